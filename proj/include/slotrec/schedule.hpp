#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "slotrec/csv.hpp"
#include "slotrec/rng.hpp"

namespace slotrec {

/// Discretization of the operating day into fixed-length slots.
///
/// Slot 0 starts at `origin_minutes` past midnight. The default grid keeps 16
/// slots of headroom before the first possible departure so that a full
/// 4-hour recommendation window always fits inside the grid.
struct TimeGrid {
  int slot_minutes = 15;
  int num_slots = 112;
  int origin_minutes = 0;  // wall-clock minutes of slot 0

  void validate() const {
    if (slot_minutes <= 0) throw InputError("TimeGrid: slot_minutes must be positive");
    if (num_slots <= 0) throw InputError("TimeGrid: num_slots must be positive");
  }

  /// Wall-clock minutes -> slot index, rounding down. May fall outside the grid.
  int slot_of_minutes(int minutes) const {
    int rel = minutes - origin_minutes;
    if (rel < 0) return -1;
    return rel / slot_minutes;
  }

  double slot_hours() const { return slot_minutes / 60.0; }
};

struct Flight {
  std::string id;
  int dep = 0;         // departure slot index
  long seats = 0;      // passengers on board (100% load factor)
  int window_len = 16; // earliest recommended arrival is dep - window_len

  /// First slot of the recommendation window [dep - window_len, dep).
  int window_begin() const { return dep - window_len; }
};

class Schedule {
 public:
  Schedule(TimeGrid grid, std::vector<Flight> flights, std::vector<double> capacity)
      : grid_(grid), flights_(std::move(flights)), capacity_(std::move(capacity)) {
    grid_.validate();
    if (capacity_.empty()) capacity_.assign(static_cast<std::size_t>(grid_.num_slots), 0.0);
    if (static_cast<int>(capacity_.size()) != grid_.num_slots) {
      throw InputError("Schedule: capacity vector length must equal num_slots");
    }
    std::stable_sort(flights_.begin(), flights_.end(), [](const Flight& a, const Flight& b) {
      if (a.dep != b.dep) return a.dep < b.dep;
      return a.id < b.id;
    });
    std::set<std::string> ids;
    long total = 0;
    for (const Flight& f : flights_) {
      if (f.seats < 1) throw InputError("flight " + f.id + ": non-positive seats");
      if (f.window_len < 1) throw InputError("flight " + f.id + ": window_len must be >= 1");
      if (f.dep < 0 || f.dep >= grid_.num_slots) {
        throw InputError("flight " + f.id + ": departure outside grid");
      }
      if (f.window_begin() < 0) {
        throw InputError("flight " + f.id + ": recommendation window extends before slot 0");
      }
      if (!ids.insert(f.id).second) throw InputError("duplicate flight id: " + f.id);
      total += f.seats;
    }
    for (double c : capacity_) {
      if (c < 0.0) throw InputError("Schedule: negative slot capacity");
    }
    if (!flights_.empty() && total <= 0) throw InputError("Schedule: total seats must be positive");
    total_seats_ = total;
  }

  const TimeGrid& grid() const { return grid_; }
  const std::vector<Flight>& flights() const { return flights_; }
  int num_flights() const { return static_cast<int>(flights_.size()); }
  long total_seats() const { return total_seats_; }
  double capacity(int slot) const { return capacity_[static_cast<std::size_t>(slot)]; }
  const std::vector<double>& capacity() const { return capacity_; }

  int max_window_len() const {
    int m = 0;
    for (const Flight& f : flights_) m = std::max(m, f.window_len);
    return m;
  }

  bool operator==(const Schedule& o) const {
    if (grid_.slot_minutes != o.grid_.slot_minutes || grid_.num_slots != o.grid_.num_slots ||
        grid_.origin_minutes != o.grid_.origin_minutes || capacity_ != o.capacity_ ||
        flights_.size() != o.flights_.size()) {
      return false;
    }
    for (std::size_t i = 0; i < flights_.size(); ++i) {
      const Flight &a = flights_[i], &b = o.flights_[i];
      if (a.id != b.id || a.dep != b.dep || a.seats != b.seats || a.window_len != b.window_len) {
        return false;
      }
    }
    return true;
  }

 private:
  TimeGrid grid_;
  std::vector<Flight> flights_;
  std::vector<double> capacity_;
  long total_seats_ = 0;
};

struct ScheduleLoadOptions {
  TimeGrid grid;
  double default_capacity = 800.0;
  int window_len = 16;
  std::string capacity_file;  // optional "slot,capacity" overrides
};

/// Read per-slot capacity overrides; slots not listed keep the default.
inline std::vector<double> load_capacity_file(const std::string& path, const TimeGrid& grid,
                                              double default_capacity) {
  std::vector<double> cap(static_cast<std::size_t>(grid.num_slots), default_capacity);
  for (const auto& row : csv::read_file(path, {"slot", "capacity"})) {
    if (row.fields.size() != 2) {
      throw InputError(path + ":" + std::to_string(row.line_no) + ": expected 2 fields");
    }
    long slot = csv::parse_long(row.fields[0], path, row.line_no);
    double c = csv::parse_double(row.fields[1], path, row.line_no);
    if (slot < 0 || slot >= grid.num_slots) {
      throw InputError(path + ":" + std::to_string(row.line_no) + ": slot out of range");
    }
    if (c < 0.0) {
      throw InputError(path + ":" + std::to_string(row.line_no) + ": negative capacity");
    }
    cap[static_cast<std::size_t>(slot)] = c;
  }
  return cap;
}

/// Load a flight schedule from CSV (`flight_id,departure,seats`, departure HH:MM).
///
/// Departure times round down to the containing slot; passengers must clear
/// security before that slot begins, so rounding up would be optimistic.
inline Schedule load_schedule(const std::string& path, const ScheduleLoadOptions& opt = {}) {
  opt.grid.validate();
  std::vector<Flight> flights;
  for (const auto& row : csv::read_file(path, {"flight_id", "departure", "seats"})) {
    const std::string where = path + ":" + std::to_string(row.line_no);
    if (row.fields.size() != 3) throw InputError(where + ": expected 3 fields");
    Flight f;
    f.id = row.fields[0];
    if (f.id.empty()) throw InputError(where + ": empty flight id");
    int minutes = parse_hhmm(row.fields[1], where);
    int slot = opt.grid.slot_of_minutes(minutes);
    if (slot < 0 || slot >= opt.grid.num_slots) {
      throw InputError(where + ": departure outside grid");
    }
    f.dep = slot;
    f.seats = csv::parse_long(row.fields[2], path, row.line_no);
    if (f.seats < 1) throw InputError(where + ": non-positive seats");
    f.window_len = opt.window_len;
    flights.push_back(std::move(f));
  }
  std::vector<double> cap(static_cast<std::size_t>(opt.grid.num_slots), opt.default_capacity);
  if (!opt.capacity_file.empty()) {
    cap = load_capacity_file(opt.capacity_file, opt.grid, opt.default_capacity);
  }
  return Schedule(opt.grid, std::move(flights), std::move(cap));
}

inline void save_schedule(const Schedule& sched, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write file: " + path);
  out << "flight_id,departure,seats\n";
  const TimeGrid& g = sched.grid();
  for (const Flight& f : sched.flights()) {
    out << f.id << ',' << format_hhmm(g.origin_minutes + f.dep * g.slot_minutes) << ','
        << f.seats << '\n';
  }
}

struct SynthOptions {
  int n_flights = 260;
  long total_seats = 49034;
  /// Departure-rate profile anchors (slot, weight), linearly interpolated.
  /// The default shape peaks in the early morning and again around midday.
  std::vector<std::pair<int, double>> peak_profile;
  TimeGrid grid;
  double default_capacity = 800.0;
  int window_len = 16;
};

namespace detail {

inline std::vector<double> interpolate_profile(const std::vector<std::pair<int, double>>& anchors,
                                               int num_slots) {
  std::vector<double> w(static_cast<std::size_t>(num_slots), 0.0);
  for (std::size_t a = 0; a + 1 < anchors.size(); ++a) {
    auto [s0, w0] = anchors[a];
    auto [s1, w1] = anchors[a + 1];
    if (s1 <= s0) throw InputError("peak profile slots must be strictly increasing");
    for (int s = std::max(s0, 0); s <= std::min(s1, num_slots - 1); ++s) {
      double t = double(s - s0) / double(s1 - s0);
      w[static_cast<std::size_t>(s)] = std::max(w[static_cast<std::size_t>(s)], w0 + t * (w1 - w0));
    }
  }
  return w;
}

}  // namespace detail

/// Generate a synthetic departure schedule of a given scale.
///
/// Departure slots are drawn from the (normalized) peak profile and seats are
/// partitioned with the largest-remainder rule so the total is met exactly
/// with every flight getting at least one seat. Deterministic in the seed.
inline Schedule synth_schedule(std::uint64_t seed, const SynthOptions& opt = {}) {
  opt.grid.validate();
  if (opt.n_flights < 1) throw InputError("synth_schedule: need at least one flight");
  if (opt.total_seats < opt.n_flights) {
    throw InputError("synth_schedule: total_seats below n_flights, cannot give every flight a seat");
  }

  // Default two-peak day: morning rush 6-8am, midday rush 12-2pm, quiet
  // shoulders, nothing before 4:45am or after 10pm local.
  std::vector<std::pair<int, double>> anchors = opt.peak_profile;
  auto hhmm_slot = [&](int h, int m) {
    return (h * 60 + m - opt.grid.origin_minutes) / opt.grid.slot_minutes;
  };
  if (anchors.empty()) {
    anchors = {
        {hhmm_slot(4, 45), 0.0}, {hhmm_slot(6, 0), 2.0},  {hhmm_slot(7, 0), 2.5},
        {hhmm_slot(8, 0), 2.0},  {hhmm_slot(9, 30), 1.2}, {hhmm_slot(11, 0), 1.3},
        {hhmm_slot(12, 0), 2.2}, {hhmm_slot(13, 0), 2.4}, {hhmm_slot(14, 0), 1.7},
        {hhmm_slot(16, 0), 1.2}, {hhmm_slot(18, 0), 1.4}, {hhmm_slot(20, 0), 1.0},
        {hhmm_slot(22, 0), 0.0},
    };
  }
  std::vector<double> weights = detail::interpolate_profile(anchors, opt.grid.num_slots);
  // Departures need room for their recommendation window inside the grid.
  for (int s = 0; s < std::min(opt.window_len, opt.grid.num_slots); ++s) {
    weights[static_cast<std::size_t>(s)] = 0.0;
  }
  double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (wsum <= 0.0) throw InputError("synth_schedule: peak profile has no positive weight");

  Rng rng = Rng::substream(seed, {stream_tag::synth_schedule});
  std::vector<Flight> flights;
  flights.reserve(static_cast<std::size_t>(opt.n_flights));
  std::vector<double> size_weight(static_cast<std::size_t>(opt.n_flights));
  for (int i = 0; i < opt.n_flights; ++i) {
    Flight f;
    char id[16];
    std::snprintf(id, sizeof(id), "SYN%04d", i);
    f.id = id;
    f.dep = static_cast<int>(rng.categorical(weights));
    f.window_len = opt.window_len;
    f.seats = 1;  // replaced below by the largest-remainder partition
    // Mix of narrow-body and larger aircraft; weights only set proportions.
    double u = rng.uniform();
    size_weight[static_cast<std::size_t>(i)] = (u < 0.75) ? (120.0 + 120.0 * rng.uniform())
                                                          : (220.0 + 180.0 * rng.uniform());
    flights.push_back(std::move(f));
  }

  // Largest-remainder partition of total_seats with a floor of 1 per flight.
  long remaining = opt.total_seats - opt.n_flights;
  double sw = std::accumulate(size_weight.begin(), size_weight.end(), 0.0);
  std::vector<std::pair<double, int>> frac(static_cast<std::size_t>(opt.n_flights));
  long assigned = 0;
  for (int i = 0; i < opt.n_flights; ++i) {
    double share = double(remaining) * size_weight[static_cast<std::size_t>(i)] / sw;
    long whole = static_cast<long>(std::floor(share));
    flights[static_cast<std::size_t>(i)].seats += whole;
    assigned += whole;
    frac[static_cast<std::size_t>(i)] = {share - double(whole), i};
  }
  std::stable_sort(frac.begin(), frac.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (long k = 0; k < remaining - assigned; ++k) {
    flights[static_cast<std::size_t>(frac[static_cast<std::size_t>(k)].second)].seats += 1;
  }

  std::vector<double> cap(static_cast<std::size_t>(opt.grid.num_slots), opt.default_capacity);
  return Schedule(opt.grid, std::move(flights), std::move(cap));
}

}  // namespace slotrec
