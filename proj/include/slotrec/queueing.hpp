#pragma once

#include <cmath>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "slotrec/csv.hpp"
#include "slotrec/schedule.hpp"

namespace slotrec {

/// Per-slot arrival counts at the checkpoint, optionally with the individual
/// (flight, slot) records that produced them.
struct ArrivalStream {
  std::vector<double> counts;  // indexed by slot, may extend past the grid

  struct Record {
    int flight = 0;
    int slot = 0;
  };
  std::vector<Record> records;  // per passenger; empty unless the producer keeps them

  void add(int slot, double n) {
    if (slot < 0) throw InputError("ArrivalStream: negative slot");
    if (static_cast<std::size_t>(slot) >= counts.size()) {
      counts.resize(static_cast<std::size_t>(slot) + 1, 0.0);
    }
    counts[static_cast<std::size_t>(slot)] += n;
  }

  double total() const {
    double s = 0.0;
    for (double c : counts) s += c;
    return s;
  }
};

/// First-come-first-served point queue sampled at slot boundaries.
///
/// All cumulative curves are end-of-slot values: a(t) passengers that have
/// arrived at security, d(t) passengers through the checkpoint, q(t) seats on
/// flights that have already departed.
struct QueueTrace {
  std::vector<double> arrivals;     // per-slot arrivals
  std::vector<double> throughput;   // per-slot checkpoint throughput
  std::vector<double> cum_arrivals;
  std::vector<double> cum_departures;
  std::vector<double> cum_flight_departures;
  std::vector<double> queue_len;    // backlog at end of each slot, = a - d
  int slot_minutes = 15;

  int num_slots() const { return static_cast<int>(arrivals.size()); }
};

/// Push the arrival stream through the capacity profile; the horizon extends
/// past the grid (reusing the final slot capacity) until the queue drains.
inline QueueTrace fcfs_evaluate(const ArrivalStream& stream, const Schedule& sched) {
  const TimeGrid& g = sched.grid();
  double last_cap = g.num_slots > 0 ? sched.capacity(g.num_slots - 1) : 0.0;

  std::vector<double> seats_departing(static_cast<std::size_t>(g.num_slots), 0.0);
  for (const Flight& f : sched.flights()) {
    seats_departing[static_cast<std::size_t>(f.dep)] += static_cast<double>(f.seats);
  }

  int horizon = std::max<int>(g.num_slots, static_cast<int>(stream.counts.size()));
  QueueTrace tr;
  tr.slot_minutes = g.slot_minutes;
  double queue = 0.0, cum_a = 0.0, cum_d = 0.0, cum_q = 0.0;
  const double drained_eps = 1e-9;
  int t = 0;
  while (t < horizon || queue > drained_eps) {
    double a = (static_cast<std::size_t>(t) < stream.counts.size())
                   ? stream.counts[static_cast<std::size_t>(t)]
                   : 0.0;
    double cap = (t < g.num_slots) ? sched.capacity(t) : last_cap;
    if (t >= horizon && cap <= drained_eps) {
      throw InputError("fcfs_evaluate: trailing capacity is zero, queue cannot drain");
    }
    double served = std::min(cap, queue + a);
    queue = queue + a - served;
    cum_a += a;
    cum_d += served;
    if (t < g.num_slots) cum_q += seats_departing[static_cast<std::size_t>(t)];
    tr.arrivals.push_back(a);
    tr.throughput.push_back(served);
    tr.cum_arrivals.push_back(cum_a);
    tr.cum_departures.push_back(cum_d);
    tr.cum_flight_departures.push_back(cum_q);
    tr.queue_len.push_back(queue);
    ++t;
    if (t > horizon + 100000) {
      throw InputError("fcfs_evaluate: queue failed to drain within a sane horizon");
    }
  }
  return tr;
}

/// Total waiting time in passenger-hours: the area between the cumulative
/// arrival and cumulative departure curves.
inline double total_wait_hours(const QueueTrace& tr) {
  double area = 0.0;
  for (std::size_t t = 0; t < tr.cum_arrivals.size(); ++t) {
    area += tr.cum_arrivals[t] - tr.cum_departures[t];
  }
  return area * (tr.slot_minutes / 60.0);
}

/// Passenger-hours saved by `controlled` relative to `baseline`
/// (negative when the policy makes queues worse).
inline double total_time_savings(const QueueTrace& baseline, const QueueTrace& controlled) {
  if (baseline.slot_minutes != controlled.slot_minutes) {
    throw InputError("total_time_savings: traces use different slot widths");
  }
  return total_wait_hours(baseline) - total_wait_hours(controlled);
}

struct MissedFlightReport {
  bool any = false;
  int first_slot = -1;
  double worst_shortfall = 0.0;  // max over slots of q(t) - d(t)
};

/// Passengers miss their flight when seats already departed outrun checkpoint
/// throughput: any slot with q(t) > d(t).
inline MissedFlightReport missed_flight_check(const QueueTrace& tr) {
  MissedFlightReport rep;
  const double eps = 1e-9;
  for (std::size_t t = 0; t < tr.cum_flight_departures.size(); ++t) {
    double shortfall = tr.cum_flight_departures[t] - tr.cum_departures[t];
    if (shortfall > rep.worst_shortfall) rep.worst_shortfall = shortfall;
    if (shortfall > eps && !rep.any) {
      rep.any = true;
      rep.first_slot = static_cast<int>(t);
    }
  }
  return rep;
}

inline void save_trace(const QueueTrace& tr, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write file: " + path);
  out << "slot,a,d,q,queue_len\n";
  for (int t = 0; t < tr.num_slots(); ++t) {
    auto i = static_cast<std::size_t>(t);
    out << t << ',' << csv::fmt(tr.cum_arrivals[i]) << ',' << csv::fmt(tr.cum_departures[i])
        << ',' << csv::fmt(tr.cum_flight_departures[i]) << ',' << csv::fmt(tr.queue_len[i])
        << '\n';
  }
}

}  // namespace slotrec
