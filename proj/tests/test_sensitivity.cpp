#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>

#include "slotrec/sensitivity.hpp"

using namespace slotrec;

namespace {

SweepBase small_base(double cap, double mu = 0.7, double sigma = 0.2) {
  TimeGrid grid{15, 14, 0};
  std::vector<Flight> flights = {{"A", 8, 400, 6}, {"B", 9, 300, 6}, {"C", 10, 300, 6}};
  std::vector<double> capacity(14, cap);
  SweepBase base;
  base.schedule = Schedule(grid, std::move(flights), std::move(capacity));
  base.beta = BetaModel(BetaVector({0.3, 0.25, 0.2, 0.1, 0.1, 0.05}));
  base.compliance = ComplianceModel::constant(base.schedule, mu, sigma);
  base.cc = CCConfig{0.05};
  base.mean_lead_slots = 4;
  return base;
}

SimConfig quick_sim() {
  SimConfig sim;
  sim.seed = 4242;
  sim.n_replications = 30;
  return sim;
}

}  // namespace

TEST_CASE("sweep parameter names round-trip") {
  CHECK(parse_sweep_parameter("gamma") == SweepParameter::gamma);
  CHECK(parse_sweep_parameter("mu") == SweepParameter::mu);
  CHECK(parse_sweep_parameter("sigma") == SweepParameter::sigma);
  CHECK_THROWS_AS(parse_sweep_parameter("rho"), InputError);
  CHECK(std::string(to_string(SweepParameter::sigma)) == "sigma");
  CHECK(default_sweep_values(SweepParameter::gamma) == std::vector<double>{0.01, 0.05, 0.1});
  CHECK(default_sweep_values(SweepParameter::mu) == std::vector<double>{0.5, 0.7, 0.9});
  CHECK(default_sweep_values(SweepParameter::sigma) == std::vector<double>{0.1, 0.2, 0.3});
}

TEST_CASE("sweep specs reject out-of-domain grids") {
  SweepSpec spec;
  spec.base = small_base(320.0);
  spec.values = {};
  CHECK_THROWS_AS(spec.validate(), InputError);
  spec.values = {0.0};
  spec.parameter = SweepParameter::gamma;
  CHECK_THROWS_AS(spec.validate(), InputError);
  spec.values = {0.6};
  CHECK_THROWS_AS(spec.validate(), InputError);
  spec.parameter = SweepParameter::mu;
  spec.values = {1.2};
  CHECK_THROWS_AS(spec.validate(), InputError);
  spec.parameter = SweepParameter::sigma;
  spec.values = {-0.1};
  CHECK_THROWS_AS(spec.validate(), InputError);
  spec.values = {0.2};
  CHECK_NOTHROW(spec.validate());
}

TEST_CASE("early assignment mass counts only mass beyond the typical lead") {
  TimeGrid grid{15, 12, 0};
  std::vector<double> cap(12, 500.0);
  Schedule sched(grid, {{"A", 10, 100, 6}}, cap);
  Policy p(sched, PolicySource::imported);
  p.set(0, 9, 0.3);  // lead 1
  p.set(0, 6, 0.3);  // lead 4
  p.set(0, 5, 0.2);  // lead 5
  p.set(0, 4, 0.2);  // lead 6
  CHECK_THAT(early_assignment_mass(p, sched, 4), Catch::Matchers::WithinAbs(40.0, 1e-12));
  CHECK_THAT(early_assignment_mass(p, sched, 5), Catch::Matchers::WithinAbs(20.0, 1e-12));
  CHECK_THAT(early_assignment_mass(p, sched, 6), Catch::Matchers::WithinAbs(0.0, 1e-12));
}

TEST_CASE("gamma sweep: objective non-increasing, rows ordered and complete") {
  SweepSpec spec;
  spec.parameter = SweepParameter::gamma;
  spec.values = {0.01, 0.05, 0.1};
  spec.base = small_base(300.0);
  spec.violation_samples = 200;
  std::vector<SweepRecord> rows = run_sweep(spec, quick_sim());
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].parameter == SweepParameter::gamma);
    CHECK(rows[i].value == spec.values[i]);
    REQUIRE(rows[i].status == SolveStatus::optimal);
    CHECK(std::isfinite(rows[i].objective));
    CHECK(std::isfinite(rows[i].tts_mean));
    CHECK(std::isfinite(rows[i].max_violation_rate));
    CHECK(rows[i].early_mass >= 0.0);
  }
  CHECK(rows[0].objective >= rows[1].objective - 1e-8);
  CHECK(rows[1].objective >= rows[2].objective - 1e-8);
}

TEST_CASE("an infeasible grid point is recorded, not fatal") {
  // Two flights sharing a departure slot: the natural arrival peak exceeds
  // capacity, so with enormous spread no policy can hedge enough.
  TimeGrid grid{15, 10, 0};
  std::vector<Flight> flights = {{"A", 6, 300, 4}, {"B", 6, 300, 4}};
  std::vector<double> cap(10, 330.0);
  SweepBase base;
  base.schedule = Schedule(grid, std::move(flights), std::move(cap));
  base.beta = BetaModel(BetaVector({0.6, 0.2, 0.1, 0.1}));
  base.compliance = ComplianceModel::constant(base.schedule, 0.7, 0.2);
  base.cc = CCConfig{0.05};
  base.mean_lead_slots = 3;

  SweepSpec spec;
  spec.parameter = SweepParameter::sigma;
  spec.values = {0.05, 3.0};
  spec.base = base;
  spec.violation_samples = 100;
  SimConfig sim = quick_sim();
  sim.n_replications = 5;
  std::vector<SweepRecord> rows = run_sweep(spec, sim);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].status == SolveStatus::optimal);
  CHECK(rows[1].status == SolveStatus::infeasible);
  CHECK(std::isnan(rows[1].objective));
  CHECK(std::isnan(rows[1].tts_mean));
}

TEST_CASE("a sweep row can be reproduced standalone") {
  SweepSpec spec;
  spec.parameter = SweepParameter::mu;
  spec.values = {0.5, 0.7, 0.9};
  spec.base = small_base(310.0);
  spec.violation_samples = 150;
  SimConfig sim = quick_sim();
  std::vector<SweepRecord> rows = run_sweep(spec, sim);
  REQUIRE(rows.size() == 3);
  for (int i = 0; i < 3; ++i) {
    SweepRecord solo = run_sweep_point(spec, sim, i);
    CHECK(solo.status == rows[static_cast<std::size_t>(i)].status);
    CHECK(solo.objective == rows[static_cast<std::size_t>(i)].objective);
    CHECK(solo.tts_mean == rows[static_cast<std::size_t>(i)].tts_mean);
    CHECK(solo.tts_stderr == rows[static_cast<std::size_t>(i)].tts_stderr);
    CHECK(solo.max_violation_rate == rows[static_cast<std::size_t>(i)].max_violation_rate);
    CHECK(solo.early_mass == rows[static_cast<std::size_t>(i)].early_mass);
  }
  CHECK_THROWS_AS(run_sweep_point(spec, sim, 3), InputError);
  CHECK_THROWS_AS(run_sweep_point(spec, sim, -1), InputError);
}

TEST_CASE("parallel sweep matches serial") {
  SweepSpec spec;
  spec.parameter = SweepParameter::sigma;
  spec.values = {0.1, 0.15, 0.2, 0.25};
  spec.base = small_base(320.0);
  spec.violation_samples = 100;
  SimConfig sim = quick_sim();
  sim.n_replications = 10;
  std::vector<SweepRecord> serial = run_sweep(spec, sim, 1);
  std::vector<SweepRecord> parallel = run_sweep(spec, sim, 3);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].objective == parallel[i].objective);
    CHECK(serial[i].tts_mean == parallel[i].tts_mean);
    CHECK(serial[i].max_violation_rate == parallel[i].max_violation_rate);
    CHECK(serial[i].early_mass == parallel[i].early_mass);
  }
}

TEST_CASE("sweep report round-trips through CSV") {
  SweepSpec spec;
  spec.parameter = SweepParameter::gamma;
  spec.values = {0.02, 0.2};
  spec.base = small_base(320.0);
  spec.violation_samples = 100;
  SimConfig sim = quick_sim();
  sim.n_replications = 8;
  std::vector<SweepRecord> rows = run_sweep(spec, sim);
  std::string path = (std::filesystem::temp_directory_path() / "slotrec_sweep.csv").string();
  save_sweep(rows, path);
  auto parsed = csv::read_file(path, {"param", "value", "objective", "tts_mean", "tts_stderr",
                                      "max_violation_rate", "early_mass", "status"});
  REQUIRE(parsed.size() == 2);
  CHECK(parsed[0].fields[0] == "gamma");
  CHECK(parsed[0].fields[7] == "optimal");
  CHECK(csv::parse_double(parsed[1].fields[1], path, 3) == 0.2);
  double obj = csv::parse_double(parsed[0].fields[2], path, 2);
  CHECK_THAT(obj, Catch::Matchers::WithinRel(rows[0].objective, 1e-10));
  std::remove(path.c_str());
}
