#include <catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <vector>

#include "slotrec/queueing.hpp"
#include "slotrec/rng.hpp"
#include "slotrec/schedule.hpp"

using namespace slotrec;

namespace {

Schedule tiny_schedule(int num_slots, double capacity, int dep = -1, long seats = 10) {
  TimeGrid g;
  g.num_slots = num_slots;
  std::vector<Flight> flights;
  Flight f;
  f.id = "T1";
  f.dep = dep < 0 ? num_slots - 1 : dep;
  f.seats = seats;
  f.window_len = 1;
  flights.push_back(f);
  return Schedule(g, flights, std::vector<double>(static_cast<std::size_t>(num_slots), capacity));
}

}  // namespace

TEST_CASE("queue recursion matches a hand-worked example") {
  Schedule s = tiny_schedule(4, 5.0);
  ArrivalStream a;
  a.add(0, 3.0);
  a.add(1, 9.0);
  a.add(3, 2.0);
  QueueTrace tr = fcfs_evaluate(a, s);
  REQUIRE(tr.num_slots() == 4);
  // served: min(5,3)=3; min(5,0+9)=5 leaving 4; min(5,4)=4; min(5,2)=2
  CHECK(tr.throughput[0] == 3.0);
  CHECK(tr.throughput[1] == 5.0);
  CHECK(tr.throughput[2] == 4.0);
  CHECK(tr.throughput[3] == 2.0);
  CHECK(tr.queue_len[1] == 4.0);
  CHECK(tr.queue_len[2] == 0.0);
  // Waiting area: (cum arrivals - cum served) summed over slots, kept in hours.
  // Slot gaps: (3-3)+(12-8)+(12-12)+(14-14) = 4 passenger-slots = 1 hour.
  CHECK(total_wait_hours(tr) == Catch::Approx(1.0));
}

TEST_CASE("saturated slots serve exactly at capacity") {
  Schedule s = tiny_schedule(3, 800.0);
  ArrivalStream a;
  a.add(0, 1000.0);
  QueueTrace tr = fcfs_evaluate(a, s);
  CHECK(tr.throughput[0] == 800.0);
  CHECK(tr.throughput[1] == 200.0);
  CHECK(tr.throughput[2] == 0.0);
  CHECK(tr.queue_len[0] == 200.0);
}

TEST_CASE("horizon extends with trailing capacity until the queue drains") {
  Schedule s = tiny_schedule(3, 4.0);
  ArrivalStream a;
  a.add(0, 20.0);
  QueueTrace tr = fcfs_evaluate(a, s);
  CHECK(tr.num_slots() == 5);  // 20 passengers at 4 per slot
  CHECK(tr.queue_len.back() == 0.0);
  CHECK(tr.cum_departures.back() == 20.0);
  // Conservation once drained.
  CHECK(tr.cum_departures.back() == tr.cum_arrivals.back());
}

TEST_CASE("undrainable queue is an error, not a hang") {
  TimeGrid g;
  g.num_slots = 2;
  std::vector<Flight> flights;
  Flight f;
  f.id = "T1";
  f.dep = 1;
  f.seats = 5;
  f.window_len = 1;
  flights.push_back(f);
  Schedule s(g, flights, {4.0, 0.0});
  ArrivalStream a;
  a.add(0, 10.0);
  CHECK_THROWS_AS(fcfs_evaluate(a, s), InputError);
}

TEST_CASE("time savings is the wait difference between two traces") {
  Schedule s = tiny_schedule(4, 5.0);
  ArrivalStream bunched;
  bunched.add(1, 14.0);
  ArrivalStream spread;
  spread.add(0, 5.0);
  spread.add(1, 5.0);
  spread.add(2, 4.0);
  QueueTrace tb = fcfs_evaluate(bunched, s);
  QueueTrace ts = fcfs_evaluate(spread, s);
  CHECK(total_wait_hours(ts) == 0.0);
  CHECK(total_time_savings(tb, ts) == Catch::Approx(total_wait_hours(tb)));
  CHECK(total_time_savings(tb, ts) > 0.0);
  // Antisymmetry of the savings measure.
  CHECK(total_time_savings(ts, tb) == Catch::Approx(-total_time_savings(tb, ts)));
}

TEST_CASE("missed flights are flagged when departed seats outrun throughput") {
  Schedule s = tiny_schedule(4, 5.0, 3, 10);

  ArrivalStream early;
  early.add(0, 5.0);
  early.add(1, 5.0);
  MissedFlightReport ra = missed_flight_check(fcfs_evaluate(early, s));
  CHECK_FALSE(ra.any);
  CHECK(ra.first_slot == -1);

  // Ten passengers but only seven can clear security by end of slot 3.
  ArrivalStream late;
  late.add(2, 2.0);
  late.add(3, 8.0);
  MissedFlightReport rb = missed_flight_check(fcfs_evaluate(late, s));
  CHECK(rb.any);
  CHECK(rb.first_slot == 3);
  CHECK(rb.worst_shortfall == Catch::Approx(3.0));
}

TEST_CASE("empty stream leaves only the flight departure curve") {
  Schedule s = tiny_schedule(3, 5.0, 1, 7);
  QueueTrace tr = fcfs_evaluate(ArrivalStream{}, s);
  CHECK(tr.cum_arrivals.back() == 0.0);
  CHECK(tr.cum_departures.back() == 0.0);
  CHECK(tr.cum_flight_departures[0] == 0.0);
  CHECK(tr.cum_flight_departures[1] == 7.0);
  CHECK(tr.cum_flight_departures[2] == 7.0);
  CHECK(missed_flight_check(tr).any);
}

TEST_CASE("raising capacity never increases waiting") {
  Rng rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    int T = 6;
    std::vector<double> cap(static_cast<std::size_t>(T));
    ArrivalStream a;
    for (int t = 0; t < T; ++t) {
      cap[static_cast<std::size_t>(t)] = 1.0 + double(rng.below(8));
      a.add(t, double(rng.below(12)));
    }
    TimeGrid g;
    g.num_slots = T;
    Flight f;
    f.id = "T1";
    f.dep = T - 1;
    f.seats = 1;
    f.window_len = 1;
    Schedule base(g, {f}, cap);
    double w0 = total_wait_hours(fcfs_evaluate(a, base));
    int bump = static_cast<int>(rng.below(static_cast<std::uint64_t>(T)));
    cap[static_cast<std::size_t>(bump)] += 3.0;
    Schedule more(g, {f}, cap);
    double w1 = total_wait_hours(fcfs_evaluate(a, more));
    CHECK(w1 <= w0 + 1e-12);
  }
}

TEST_CASE("trace csv uses the cumulative-curve columns") {
  Schedule s = tiny_schedule(2, 5.0, 1, 3);
  ArrivalStream a;
  a.add(0, 2.5);
  QueueTrace tr = fcfs_evaluate(a, s);
  save_trace(tr, "trace_fmt.csv");
  std::ifstream in("trace_fmt.csv");
  std::string header, line0, line1;
  std::getline(in, header);
  std::getline(in, line0);
  std::getline(in, line1);
  in.close();
  std::remove("trace_fmt.csv");
  CHECK(header == "slot,a,d,q,queue_len");
  CHECK(line0 == "0,2.5,2.5,0,0");
  CHECK(line1 == "1,2.5,2.5,3,0");
}
