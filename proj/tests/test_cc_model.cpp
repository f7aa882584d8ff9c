#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "slotrec/cc_model.hpp"
#include "slotrec/rng.hpp"

using namespace slotrec;

namespace {

Schedule make_schedule(std::vector<Flight> flights, double cap, TimeGrid grid = {15, 24, 0}) {
  std::vector<double> capacity(static_cast<std::size_t>(grid.num_slots), cap);
  return Schedule(grid, std::move(flights), std::move(capacity));
}

std::string temp_path(const char* stem) {
  return (std::filesystem::temp_directory_path() / stem).string();
}

Policy random_policy(const Schedule& sched, Rng& rng) {
  Policy p(sched, PolicySource::imported);
  for (int i = 0; i < sched.num_flights(); ++i) {
    const Flight& f = sched.flights()[static_cast<std::size_t>(i)];
    double sum = 0.0;
    std::vector<double> w(static_cast<std::size_t>(f.window_len));
    for (double& v : w) {
      v = 0.05 + rng.uniform();
      sum += v;
    }
    for (int k = 0; k < f.window_len; ++k) {
      p.set(i, f.window_begin() + k, w[static_cast<std::size_t>(k)] / sum);
    }
  }
  return p;
}

}  // namespace

TEST_CASE("compliance model holds constants and validates bounds") {
  Schedule sched = make_schedule({{"F1", 10, 100, 4}}, 500.0);
  ComplianceModel m = ComplianceModel::constant(sched, 0.7, 0.2);
  CHECK(m.mu(0, 3) == 0.7);
  CHECK(m.sigma(0, 17) == 0.2);
  m.set(0, 5, 1.5, 0.2);
  CHECK_THROWS_AS(m.validate(), InputError);
  m.set(0, 5, 0.5, -0.1);
  CHECK_THROWS_AS(m.validate(), InputError);
  CHECK_THROWS_AS(ComplianceModel::constant(sched, -0.1, 0.2), InputError);
}

TEST_CASE("compliance file applies most-specific rows last") {
  Schedule sched = make_schedule({{"F1", 10, 100, 4}, {"F2", 12, 200, 4}}, 500.0);
  std::string path = temp_path("slotrec_compliance.csv");
  {
    std::ofstream out(path);
    out << "flight_id,slot,mu,sigma\n"
        << "F2,5,0.9,0.05\n"   // most specific listed first on purpose
        << "*,*,0.5,0.3\n"
        << "F2,*,0.8,0.25\n"
        << "*,5,0.6,0.1\n";
  }
  ComplianceModel m = load_compliance_file(path, sched);
  CHECK(m.mu(0, 4) == 0.5);
  CHECK(m.sigma(0, 4) == 0.3);
  CHECK(m.mu(0, 5) == 0.6);
  CHECK(m.sigma(0, 5) == 0.1);
  CHECK(m.mu(1, 4) == 0.8);
  CHECK(m.sigma(1, 4) == 0.25);
  CHECK(m.mu(1, 5) == 0.9);
  CHECK(m.sigma(1, 5) == 0.05);
  std::remove(path.c_str());
}

TEST_CASE("compliance file leaves untouched cells at defaults and rejects bad rows") {
  Schedule sched = make_schedule({{"F1", 10, 100, 4}}, 500.0);
  std::string path = temp_path("slotrec_compliance2.csv");
  {
    std::ofstream out(path);
    out << "flight_id,slot,mu,sigma\nF1,5,0.9,0.1\n";
  }
  ComplianceModel m = load_compliance_file(path, sched);
  CHECK(m.mu(0, 5) == 0.9);
  CHECK(m.mu(0, 6) == 0.7);
  CHECK(m.sigma(0, 6) == 0.2);

  {
    std::ofstream out(path);
    out << "flight_id,slot,mu,sigma\nFX,5,0.9,0.1\n";
  }
  CHECK_THROWS_WITH(load_compliance_file(path, sched),
                    Catch::Matchers::ContainsSubstring("unknown flight"));
  {
    std::ofstream out(path);
    out << "flight_id,slot,mu,sigma\nF1,5,1.2,0.1\n";
  }
  CHECK_THROWS_WITH(load_compliance_file(path, sched),
                    Catch::Matchers::ContainsSubstring("mu outside"));
  std::remove(path.c_str());
}

TEST_CASE("expected arrivals collapse to the recommendation under full compliance") {
  Rng rng(42);
  Schedule sched = make_schedule({{"A", 10, 300, 5}, {"B", 12, 200, 6}}, 500.0);
  Policy p = random_policy(sched, rng);
  ComplianceModel full = ComplianceModel::constant(sched, 1.0, 0.0);
  BetaVector beta({0.4, 0.3, 0.2, 0.1});
  std::vector<double> y = expected_arrivals(p, sched, beta, full);
  for (int t = 0; t < 24; ++t) {
    double want = 300.0 * p(0, t) + 200.0 * p(1, t);
    CHECK_THAT(y[static_cast<std::size_t>(t)], Catch::Matchers::WithinAbs(want, 1e-10));
  }
}

TEST_CASE("expected arrivals ignore the recommendation under zero compliance") {
  Rng rng(43);
  Schedule sched = make_schedule({{"A", 10, 300, 4}, {"B", 12, 200, 4}}, 500.0);
  Policy p = random_policy(sched, rng);
  ComplianceModel none = ComplianceModel::constant(sched, 0.0, 0.0);
  BetaVector beta({0.4, 0.3, 0.2, 0.1});
  std::vector<double> y = expected_arrivals(p, sched, beta, none);
  for (int t = 0; t < 24; ++t) {
    double want = 0.0;
    for (int i = 0; i < 2; ++i) {
      const Flight& f = sched.flights()[static_cast<std::size_t>(i)];
      want += static_cast<double>(f.seats) * beta(f.dep - t);
    }
    CHECK_THAT(y[static_cast<std::size_t>(t)], Catch::Matchers::WithinAbs(want, 1e-10));
  }
}

TEST_CASE("expected arrivals blend the two channels for one flight") {
  Schedule sched = make_schedule({{"A", 10, 100, 3}}, 500.0);
  Policy p(sched, PolicySource::imported);
  p.set(0, 9, 1.0);  // everything recommended one slot ahead
  ComplianceModel m = ComplianceModel::constant(sched, 0.7, 0.2);
  BetaVector beta({0.5, 0.3, 0.2});
  std::vector<double> y = expected_arrivals(p, sched, beta, m);
  CHECK_THAT(y[9], Catch::Matchers::WithinAbs(100.0 * (0.7 + 0.3 * 0.5), 1e-12));
  CHECK_THAT(y[8], Catch::Matchers::WithinAbs(100.0 * 0.3 * 0.3, 1e-12));
  CHECK_THAT(y[7], Catch::Matchers::WithinAbs(100.0 * 0.3 * 0.2, 1e-12));
  double total = 0.0;
  for (double v : y) total += v;
  CHECK_THAT(total, Catch::Matchers::WithinAbs(100.0, 1e-9));
}

TEST_CASE("expected arrivals conserve seats when windows cover the lead support") {
  Rng rng(44);
  Schedule sched = make_schedule({{"A", 10, 311, 5}, {"B", 12, 207, 5}, {"C", 15, 413, 5}}, 900.0);
  Policy p = random_policy(sched, rng);
  ComplianceModel m = ComplianceModel::constant(sched, 0.6, 0.15);
  BetaVector beta({0.35, 0.3, 0.2, 0.1, 0.05});
  std::vector<double> y = expected_arrivals(p, sched, beta, m);
  double total = 0.0;
  for (double v : y) total += v;
  CHECK_THAT(total, Catch::Matchers::WithinAbs(931.0, 1e-8));
}

TEST_CASE("stacked blocks reproduce the scalar arrival count for sampled compliance") {
  Rng rng(4571);
  TimeGrid grid{15, 16, 0};
  std::vector<Flight> flights = {
      {"A", 8, 250, 6}, {"B", 10, 120, 4}, {"C", 12, 340, 6}, {"D", 15, 90, 3}};
  std::vector<double> cap(16, 400.0);
  Schedule sched(grid, flights, cap);
  VarMap vars(sched);
  BetaVector beta({0.3, 0.25, 0.2, 0.1, 0.1, 0.05});
  ComplianceModel comp = ComplianceModel::constant(sched, 0.7, 0.2);
  for (int i = 0; i < 4; ++i) {
    for (int t = 0; t < 16; ++t) {
      comp.set(i, t, 0.3 + 0.5 * rng.uniform(), 0.05 + 0.2 * rng.uniform());
    }
  }
  Policy p = random_policy(sched, rng);
  std::vector<double> x(static_cast<std::size_t>(vars.num_vars()), 0.0);
  for (int v = 0; v < vars.num_vars(); ++v) {
    auto [i, t] = vars.flight_slot(v);
    x[static_cast<std::size_t>(v)] = p(i, t);
  }

  int N = sched.num_flights();
  for (int t = 0; t < 16; ++t) {
    SlotConstraintBlocks blk = build_slot_blocks(sched, beta, comp, vars, t);
    for (int rep = 0; rep < 5; ++rep) {
      // xi: sampled compliance share on top, ones below.
      Eigen::VectorXd xi = Eigen::VectorXd::Ones(2 * N);
      for (int i = 0; i < N; ++i) xi[i] = rng.uniform();

      Eigen::VectorXd stacked = Eigen::VectorXd::Zero(blk.A.cols());
      for (int c = 0; c < static_cast<int>(blk.stacked_index.size()); ++c) {
        int g = blk.stacked_index[static_cast<std::size_t>(c)];
        if (g >= 0) stacked[c] = x[static_cast<std::size_t>(g)];
      }
      double matrix_side = xi.dot(blk.d_tilde.asDiagonal() * (blk.A * stacked));

      double scalar_side = 0.0;
      for (int i = 0; i < N; ++i) {
        const Flight& f = sched.flights()[static_cast<std::size_t>(i)];
        double alpha = xi[i];
        double xit = p(i, t);
        double share = 0.0;
        for (int s = f.window_begin(); s < f.dep; ++s) share += p(i, s);
        double b = beta(f.dep - t);
        scalar_side += static_cast<double>(f.seats) * (alpha * xit + (1.0 - alpha) * b * share);
      }
      CHECK_THAT(matrix_side, Catch::Matchers::WithinAbs(scalar_side, 1e-10 * 1000.0));
    }
  }
}

TEST_CASE("stacked block structure: identity, mirrored betas, aliasing, covariance") {
  TimeGrid grid{15, 16, 0};
  std::vector<Flight> flights = {{"A", 8, 250, 6}, {"B", 10, 120, 4}};
  std::vector<double> cap(16, 400.0);
  Schedule sched(grid, flights, cap);
  VarMap vars(sched);
  BetaVector beta({0.4, 0.3, 0.2, 0.1});
  ComplianceModel comp = ComplianceModel::constant(sched, 0.7, 0.2);
  int N = 2, M = sched.max_window_len();
  int t = 6;
  SlotConstraintBlocks blk = build_slot_blocks(sched, beta, comp, vars, t);
  REQUIRE(blk.A.rows() == 2 * N);
  REQUIRE(blk.A.cols() == (M + 1) * N);
  for (int i = 0; i < N; ++i) {
    CHECK(blk.A.coeff(i, i) == 1.0);          // recommended-slot identity
    CHECK(blk.A.coeff(N + i, i) == 0.0);      // no direct term in the fallback row
    const Flight& f = sched.flights()[static_cast<std::size_t>(i)];
    double b = beta(f.dep - t);
    for (int k = 1; k <= M; ++k) {
      CHECK(blk.A.coeff(i, k * N + i) == -b);
      CHECK(blk.A.coeff(N + i, k * N + i) == b);
    }
    CHECK(blk.d_tilde[i] == static_cast<double>(f.seats));
    CHECK(blk.d_tilde[N + i] == static_cast<double>(f.seats));
    CHECK(blk.mu[i] == 0.7);
    CHECK(blk.mu[N + i] == 1.0);
    CHECK_THAT(blk.Sigma.coeff(i, i), Catch::Matchers::WithinAbs(0.04, 1e-15));
    CHECK(blk.Sigma.coeff(N + i, N + i) == 0.0);
    // Aliasing: the block-0 entry and the matching lead block share a variable.
    int k0 = f.dep - t;
    if (k0 >= 1 && k0 <= f.window_len) {
      CHECK(blk.stacked_index[static_cast<std::size_t>(i)] ==
            blk.stacked_index[static_cast<std::size_t>(k0 * N + i)]);
      CHECK(blk.stacked_index[static_cast<std::size_t>(i)] >= 0);
    }
  }
}

TEST_CASE("slot constraint mean and spread match the closed-form sums") {
  Rng rng(77);
  TimeGrid grid{15, 16, 0};
  std::vector<Flight> flights = {{"A", 9, 260, 5}, {"B", 11, 140, 6}, {"C", 13, 330, 4}};
  std::vector<double> cap(16, 500.0);
  Schedule sched(grid, flights, cap);
  VarMap vars(sched);
  BetaVector beta({0.3, 0.25, 0.2, 0.15, 0.05, 0.05});
  ComplianceModel comp = ComplianceModel::constant(sched, 0.7, 0.2);
  for (int i = 0; i < 3; ++i) {
    for (int t = 0; t < 16; ++t) comp.set(i, t, 0.4 + 0.5 * rng.uniform(), 0.05 + 0.3 * rng.uniform());
  }
  Policy p = random_policy(sched, rng);
  double gamma = 0.05;
  double phi_bar = detail::norm_quantile(1.0 - gamma);

  for (int t = 0; t < 16; ++t) {
    SlotConstraintBlocks blk = build_slot_blocks(sched, beta, comp, vars, t);
    ConicProgram::SocBlock soc = soc_constraint(blk, sched.capacity(t), gamma);

    double mean_row = 0.0;
    for (auto [v, cf] : soc.bound_terms) {
      auto [i, s] = vars.flight_slot(v);
      mean_row -= cf * p(i, s);  // f = -mean coefficients
    }
    double var_rows = 0.0;
    for (const auto& row : soc.norm_rows) {
      double e = 0.0;
      for (auto [v, cf] : row) {
        auto [i, s] = vars.flight_slot(v);
        e += cf * p(i, s);
      }
      var_rows += e * e;
    }

    double mean_want = 0.0, var_want = 0.0;
    for (int i = 0; i < 3; ++i) {
      const Flight& f = sched.flights()[static_cast<std::size_t>(i)];
      double d = static_cast<double>(f.seats);
      double b = beta(f.dep - t);
      double share = 0.0;
      for (int s = f.window_begin(); s < f.dep; ++s) share += p(i, s);
      double xit = p(i, t);
      if (b == 0.0 && vars.var(i, t) < 0) continue;
      mean_want += d * (comp.mu(i, t) * xit + (1.0 - comp.mu(i, t)) * b * share);
      double dev = xit - b * share;
      var_want += d * d * comp.sigma(i, t) * comp.sigma(i, t) * dev * dev;
    }
    CHECK_THAT(mean_row, Catch::Matchers::WithinAbs(mean_want, 1e-9));
    CHECK_THAT(var_rows, Catch::Matchers::WithinAbs(phi_bar * phi_bar * var_want, 1e-8));
  }
}

TEST_CASE("full compliance with no spread reduces to the deterministic program") {
  Rng rng(8123);
  for (int trial = 0; trial < 3; ++trial) {
    TimeGrid grid{15, 14, 0};
    int n = 2 + static_cast<int>(rng.below(3));
    std::vector<Flight> flights;
    for (int i = 0; i < n; ++i) {
      int wlen = 3 + static_cast<int>(rng.below(3));
      int dep = wlen + static_cast<int>(rng.below(static_cast<long>(14 - wlen)));
      flights.push_back({"R" + std::to_string(i), dep, 100 + static_cast<long>(rng.below(300)), wlen});
    }
    std::vector<double> cap(14, 350.0);
    Schedule sched(grid, std::move(flights), std::move(cap));
    CostMatrix cm = build_costs(sched, 3);
    BetaVector beta({0.4, 0.3, 0.2, 0.05, 0.05});
    ComplianceModel comp = ComplianceModel::constant(sched, 1.0, 0.0);
    PolicyResult det = solve_deterministic(sched, cm);
    PolicyResult cc = solve_chance_constrained(sched, cm, beta, comp, {0.01});
    REQUIRE(det.status == SolveStatus::optimal);
    REQUIRE(cc.status == SolveStatus::optimal);
    CHECK_THAT(cc.objective, Catch::Matchers::WithinRel(det.objective, 1e-8) ||
                                 Catch::Matchers::WithinAbs(det.objective, 1e-8));
    CHECK(cc.policy->source() == PolicySource::chance_constrained);
  }
}

TEST_CASE("tightening the overflow probability never cheapens the plan") {
  TimeGrid grid{15, 14, 0};
  std::vector<Flight> flights = {
      {"A", 8, 400, 6}, {"B", 9, 300, 6}, {"C", 10, 300, 6}};
  std::vector<double> cap(14, 300.0);
  Schedule sched(grid, flights, cap);
  CostMatrix cm = build_costs(sched, 4);
  BetaVector beta({0.3, 0.25, 0.2, 0.1, 0.1, 0.05});
  ComplianceModel comp = ComplianceModel::constant(sched, 0.7, 0.2);
  double prev = -1e300;
  for (double gamma : {0.1, 0.05, 0.01}) {
    PolicyResult r = solve_chance_constrained(sched, cm, beta, comp, {gamma});
    REQUIRE(r.status == SolveStatus::optimal);
    CHECK(r.objective >= prev - 1e-8 * std::max(1.0, std::abs(prev)));
    prev = r.objective;
  }
}

TEST_CASE("vanishing spread approaches the zero-spread plan") {
  TimeGrid grid{15, 14, 0};
  std::vector<Flight> flights = {{"A", 8, 400, 6}, {"B", 10, 300, 6}};
  std::vector<double> cap(14, 280.0);
  Schedule sched(grid, flights, cap);
  CostMatrix cm = build_costs(sched, 4);
  BetaVector beta({0.3, 0.25, 0.2, 0.1, 0.1, 0.05});
  PolicyResult tiny = solve_chance_constrained(
      sched, cm, beta, ComplianceModel::constant(sched, 0.7, 1e-7), {0.01});
  PolicyResult zero = solve_chance_constrained(
      sched, cm, beta, ComplianceModel::constant(sched, 0.7, 0.0), {0.01});
  REQUIRE(tiny.status == SolveStatus::optimal);
  REQUIRE(zero.status == SolveStatus::optimal);
  CHECK_THAT(tiny.objective, Catch::Matchers::WithinRel(zero.objective, 1e-4));
}

TEST_CASE("zero spread emits plain linear rows") {
  TimeGrid grid{15, 10, 0};
  std::vector<Flight> flights = {{"A", 6, 100, 4}};
  std::vector<double> cap(10, 200.0);
  Schedule sched(grid, flights, cap);
  VarMap vars(sched);
  BetaVector beta({0.4, 0.3, 0.2, 0.1});
  ComplianceModel comp = ComplianceModel::constant(sched, 0.7, 0.0);
  SlotConstraintBlocks blk = build_slot_blocks(sched, beta, comp, vars, 5);
  ConicProgram::SocBlock soc = soc_constraint(blk, 200.0, 0.01);
  CHECK(soc.norm_rows.empty());
  CHECK_FALSE(soc.bound_terms.empty());
}

TEST_CASE("overflow probability outside its domain is rejected") {
  TimeGrid grid{15, 10, 0};
  std::vector<Flight> flights = {{"A", 6, 100, 4}};
  std::vector<double> cap(10, 200.0);
  Schedule sched(grid, flights, cap);
  VarMap vars(sched);
  BetaVector beta({0.4, 0.3, 0.2, 0.1});
  ComplianceModel comp = ComplianceModel::constant(sched);
  SlotConstraintBlocks blk = build_slot_blocks(sched, beta, comp, vars, 5);
  CHECK_THROWS_AS(soc_constraint(blk, 200.0, 0.0), InputError);
  CHECK_THROWS_AS(soc_constraint(blk, 200.0, 0.5), InputError);
  CHECK_THROWS_AS(soc_constraint(blk, 200.0, -0.1), InputError);
  CostMatrix cm = build_costs(sched, 2);
  CHECK_THROWS_AS(solve_chance_constrained(sched, cm, beta, comp, {0.7}), InputError);
}

TEST_CASE("correlated covariance fallback preserves the quadratic form") {
  // Hand-built blocks for one flight with correlation between the channels.
  Rng rng(555);
  SlotConstraintBlocks blk;
  blk.slot = 0;
  blk.num_flights = 1;
  blk.blocks = 3;
  std::vector<Eigen::Triplet<double>> ta;
  ta.emplace_back(0, 0, 1.0);
  ta.emplace_back(0, 1, -0.4);
  ta.emplace_back(0, 2, -0.4);
  ta.emplace_back(1, 1, 0.4);
  ta.emplace_back(1, 2, 0.4);
  blk.A.resize(2, 3);
  blk.A.setFromTriplets(ta.begin(), ta.end());
  blk.d_tilde = Eigen::VectorXd::Constant(2, 10.0);
  blk.mu = Eigen::VectorXd::Ones(2);
  blk.mu[0] = 0.7;
  std::vector<Eigen::Triplet<double>> ts = {
      {0, 0, 0.04}, {0, 1, 0.01}, {1, 0, 0.01}, {1, 1, 0.02}};
  blk.Sigma.resize(2, 2);
  blk.Sigma.setFromTriplets(ts.begin(), ts.end());
  blk.stacked_index = {0, 1, 0};  // aliased first and last entries

  double gamma = 0.05;
  double phi_bar = detail::norm_quantile(1.0 - gamma);
  ConicProgram::SocBlock soc = soc_constraint(blk, 100.0, gamma);
  REQUIRE_FALSE(soc.norm_rows.empty());

  for (int rep = 0; rep < 10; ++rep) {
    Eigen::VectorXd xg(2);
    xg << rng.uniform(), rng.uniform();
    Eigen::VectorXd stacked(3);
    stacked << xg[0], xg[1], xg[0];
    Eigen::VectorXd w = blk.d_tilde.asDiagonal() * (blk.A * stacked);
    double want = phi_bar * phi_bar * w.dot(Eigen::MatrixXd(blk.Sigma) * w);
    double got = 0.0;
    for (const auto& row : soc.norm_rows) {
      double e = 0.0;
      for (auto [v, cf] : row) e += cf * xg[v];
      got += e * e;
    }
    CHECK_THAT(got, Catch::Matchers::WithinAbs(want, 1e-9 * std::max(1.0, want)));
  }
}

TEST_CASE("small chance-constrained instances match an interior-point-free oracle") {
  TimeGrid grid{15, 12, 0};
  std::vector<Flight> flights = {{"A", 6, 300, 4}, {"B", 8, 200, 4}};
  std::vector<double> cap(12, 220.0);
  Schedule sched(grid, flights, cap);
  CostMatrix cm = build_costs(sched, 3);
  BetaVector beta({0.45, 0.3, 0.15, 0.1});
  ComplianceModel comp = ComplianceModel::constant(sched, 0.7, 0.2);
  CCConfig config{0.05};

  PolicyResult r = solve_chance_constrained(sched, cm, beta, comp, config);
  REQUIRE(r.status == SolveStatus::optimal);

  // Rebuild the same program and hand it to the log-barrier oracle, started
  // from the uniform spread (verified strictly feasible first).
  VarMap vars(sched);
  ConicProgram cp(vars.num_vars());
  for (int i = 0; i < sched.num_flights(); ++i) {
    const Flight& f = sched.flights()[static_cast<std::size_t>(i)];
    SparseRow assign;
    for (int t = f.window_begin(); t < f.dep; ++t) {
      int v = vars.var(i, t);
      cp.set_lower_bound(v, 0.0);
      cp.set_objective_term(v, static_cast<double>(f.seats) * cm(i, t));
      assign.emplace_back(v, 1.0);
    }
    cp.add_equality(std::move(assign), 1.0);
  }
  for (int t = 0; t < grid.num_slots; ++t) {
    SlotConstraintBlocks blk = build_slot_blocks(sched, beta, comp, vars, t);
    ConicProgram::SocBlock soc = soc_constraint(blk, sched.capacity(t), config.gamma);
    if (soc.bound_terms.empty() && soc.norm_rows.empty()) continue;
    cp.add_soc(std::move(soc));
  }
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(vars.num_vars());
  for (int i = 0; i < sched.num_flights(); ++i) {
    const Flight& f = sched.flights()[static_cast<std::size_t>(i)];
    for (int t = f.window_begin(); t < f.dep; ++t) {
      x0[vars.var(i, t)] = 1.0 / static_cast<double>(f.window_len);
    }
  }
  oracle::BarrierAnswer truth = oracle::barrier_socp_oracle(cp, x0);
  REQUIRE(truth.converged);
  CHECK_THAT(r.objective, Catch::Matchers::WithinRel(truth.objective, 1e-5));
}
