#pragma once

// Compliance-aware arrival model and the chance-constrained program: each
// passenger follows the recommended slot with probability mu, otherwise shows
// up per the natural lead-time masses.  Capacity holds per slot with
// probability at least 1 - gamma under Gaussian compliance noise.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "slotrec/csv.hpp"
#include "slotrec/det_model.hpp"
#include "slotrec/detail/gauss.hpp"
#include "slotrec/leadtime.hpp"
#include "slotrec/schedule.hpp"

namespace slotrec {

/// Per-flight, per-slot compliance mean and spread.  mu is the expected share
/// of a flight's passengers who accept a recommendation for that slot, sigma
/// the standard deviation of that share.
class ComplianceModel {
 public:
  ComplianceModel() = default;

  static ComplianceModel constant(const Schedule& sched, double mu = 0.7, double sigma = 0.2) {
    ComplianceModel m;
    m.mu_.assign(static_cast<std::size_t>(sched.num_flights()),
                 std::vector<double>(static_cast<std::size_t>(sched.grid().num_slots), mu));
    m.sigma_.assign(static_cast<std::size_t>(sched.num_flights()),
                    std::vector<double>(static_cast<std::size_t>(sched.grid().num_slots), sigma));
    m.validate();
    return m;
  }

  double mu(int flight, int slot) const {
    return mu_[static_cast<std::size_t>(flight)][static_cast<std::size_t>(slot)];
  }
  double sigma(int flight, int slot) const {
    return sigma_[static_cast<std::size_t>(flight)][static_cast<std::size_t>(slot)];
  }
  void set(int flight, int slot, double mu, double sigma) {
    mu_[static_cast<std::size_t>(flight)][static_cast<std::size_t>(slot)] = mu;
    sigma_[static_cast<std::size_t>(flight)][static_cast<std::size_t>(slot)] = sigma;
  }

  int num_flights() const { return static_cast<int>(mu_.size()); }
  int num_slots() const { return mu_.empty() ? 0 : static_cast<int>(mu_.front().size()); }

  void validate() const {
    for (const auto& row : mu_) {
      for (double v : row) {
        if (!(v >= 0.0 && v <= 1.0)) throw InputError("ComplianceModel: mu outside [0, 1]");
      }
    }
    for (const auto& row : sigma_) {
      for (double v : row) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw InputError("ComplianceModel: bad sigma");
      }
    }
  }

 private:
  std::vector<std::vector<double>> mu_, sigma_;
};

/// CSV rows `flight_id,slot,mu,sigma`; `*` matches every flight or slot.
/// More specific rows win: (flight, slot) over (flight, *) over (*, slot)
/// over (*, *); equally specific rows apply in file order, later wins.
inline ComplianceModel load_compliance_file(const std::string& path, const Schedule& sched,
                                            double mu_default = 0.7, double sigma_default = 0.2) {
  ComplianceModel model = ComplianceModel::constant(sched, mu_default, sigma_default);
  struct Entry {
    int flight;  // -1 for *
    int slot;    // -1 for *
    double mu, sigma;
  };
  std::vector<Entry> entries;
  for (const auto& row : csv::read_file(path, {"flight_id", "slot", "mu", "sigma"})) {
    const std::string where = path + ":" + std::to_string(row.line_no);
    if (row.fields.size() != 4) throw InputError(where + ": expected 4 fields");
    Entry e{};
    if (row.fields[0] == "*") {
      e.flight = -1;
    } else {
      e.flight = -2;
      for (int i = 0; i < sched.num_flights(); ++i) {
        if (sched.flights()[static_cast<std::size_t>(i)].id == row.fields[0]) {
          e.flight = i;
          break;
        }
      }
      if (e.flight == -2) throw InputError(where + ": unknown flight id " + row.fields[0]);
    }
    if (row.fields[1] == "*") {
      e.slot = -1;
    } else {
      long s = csv::parse_long(row.fields[1], path, row.line_no);
      if (s < 0 || s >= sched.grid().num_slots) throw InputError(where + ": slot out of range");
      e.slot = static_cast<int>(s);
    }
    e.mu = csv::parse_double(row.fields[2], path, row.line_no);
    e.sigma = csv::parse_double(row.fields[3], path, row.line_no);
    if (!(e.mu >= 0.0 && e.mu <= 1.0)) throw InputError(where + ": mu outside [0, 1]");
    if (!(e.sigma >= 0.0)) throw InputError(where + ": negative sigma");
    entries.push_back(e);
  }
  auto specificity = [](const Entry& e) {
    return (e.flight >= 0 ? 2 : 0) + (e.slot >= 0 ? 1 : 0);
  };
  for (int level : {0, 1, 2, 3}) {
    for (const Entry& e : entries) {
      if (specificity(e) != level) continue;
      int f0 = e.flight >= 0 ? e.flight : 0;
      int f1 = e.flight >= 0 ? e.flight + 1 : sched.num_flights();
      int s0 = e.slot >= 0 ? e.slot : 0;
      int s1 = e.slot >= 0 ? e.slot + 1 : sched.grid().num_slots;
      for (int f = f0; f < f1; ++f) {
        for (int s = s0; s < s1; ++s) model.set(f, s, e.mu, e.sigma);
      }
    }
  }
  model.validate();
  return model;
}

struct CCConfig {
  double gamma = 0.01;  // per-slot overflow probability bound

  void validate() const {
    if (!(gamma > 0.0 && gamma < 0.5)) {
      throw InputError("CCConfig: gamma must lie strictly between 0 and 0.5");
    }
  }
};

/// Mean arrivals per slot when recommendations are followed with probability
/// mu and ignored ones fall back to the natural lead-time pattern.
template <typename BetaLike>
inline std::vector<double> expected_arrivals(const Policy& policy, const Schedule& sched,
                                             const BetaLike& beta,
                                             const ComplianceModel& compliance) {
  int T = sched.grid().num_slots;
  std::vector<double> y(static_cast<std::size_t>(T), 0.0);
  for (int i = 0; i < sched.num_flights(); ++i) {
    const Flight& f = sched.flights()[static_cast<std::size_t>(i)];
    double d = static_cast<double>(f.seats);
    double noncompliant = 0.0;
    for (int s = f.window_begin(); s < f.dep; ++s) {
      noncompliant += (1.0 - compliance.mu(i, s)) * policy(i, s);
      y[static_cast<std::size_t>(s)] += d * compliance.mu(i, s) * policy(i, s);
    }
    for (int lead = 1; lead <= f.dep; ++lead) {
      double b = beta_at(beta, i, lead);
      if (b > 0.0) y[static_cast<std::size_t>(f.dep - lead)] += d * b * noncompliant;
    }
  }
  return y;
}

/// Stacked description of one slot's arrival count as a linear form in the
/// decision variables with per-flight random compliance.  Variables are
/// stacked as M+1 blocks of N entries: block 0 holds x[i][slot], block k holds
/// x[i][dep_i - k]; stacked_index maps each entry to its global variable (-1
/// where the flight has no such variable), so aliased entries accumulate.
struct SlotConstraintBlocks {
  int slot = 0;
  int num_flights = 0;
  int blocks = 0;  // M + 1
  Eigen::SparseMatrix<double, Eigen::RowMajor> A;  // 2N x (M+1)N
  Eigen::VectorXd d_tilde;                         // seat counts, repeated
  Eigen::VectorXd mu;                              // compliance means, then ones
  Eigen::SparseMatrix<double> Sigma;               // compliance covariance, 2N x 2N
  std::vector<int> stacked_index;                  // (M+1)N -> global var or -1
};

template <typename BetaLike>
inline SlotConstraintBlocks build_slot_blocks(const Schedule& sched, const BetaLike& beta,
                                              const ComplianceModel& compliance,
                                              const VarMap& vars, int slot) {
  int N = sched.num_flights();
  int M = sched.max_window_len();
  SlotConstraintBlocks blk;
  blk.slot = slot;
  blk.num_flights = N;
  blk.blocks = M + 1;
  blk.d_tilde = Eigen::VectorXd::Zero(2 * N);
  blk.mu = Eigen::VectorXd::Zero(2 * N);
  blk.stacked_index.assign(static_cast<std::size_t>((M + 1) * N), -1);

  std::vector<Eigen::Triplet<double>> ta, ts;
  for (int i = 0; i < N; ++i) {
    const Flight& f = sched.flights()[static_cast<std::size_t>(i)];
    blk.d_tilde[i] = static_cast<double>(f.seats);
    blk.d_tilde[N + i] = static_cast<double>(f.seats);
    blk.mu[i] = compliance.mu(i, slot);
    blk.mu[N + i] = 1.0;
    double s = compliance.sigma(i, slot);
    if (s > 0.0) ts.emplace_back(i, i, s * s);

    blk.stacked_index[static_cast<std::size_t>(i)] = vars.var(i, slot);
    for (int k = 1; k <= M; ++k) {
      blk.stacked_index[static_cast<std::size_t>(k * N + i)] = vars.var(i, f.dep - k);
    }

    ta.emplace_back(i, i, 1.0);  // recommended-slot share
    double b = beta_at(beta, i, f.dep - slot);
    if (b > 0.0) {
      for (int k = 1; k <= M; ++k) {
        ta.emplace_back(i, k * N + i, -b);
        ta.emplace_back(N + i, k * N + i, b);
      }
    }
  }
  blk.A.resize(2 * N, (M + 1) * N);
  blk.A.setFromTriplets(ta.begin(), ta.end());
  blk.Sigma.resize(2 * N, 2 * N);
  blk.Sigma.setFromTriplets(ts.begin(), ts.end());
  return blk;
}

namespace detail {

/// Collapse a stacked coefficient row onto global variables, summing aliases.
inline SparseRow compose_stacked(const Eigen::VectorXd& stacked,
                                 const std::vector<int>& stacked_index) {
  std::map<int, double> acc;
  for (int c = 0; c < stacked.size(); ++c) {
    double v = stacked[c];
    if (v == 0.0) continue;
    int g = stacked_index[static_cast<std::size_t>(c)];
    if (g >= 0) acc[g] += v;
  }
  SparseRow row;
  row.reserve(acc.size());
  for (auto [g, v] : acc) {
    if (v != 0.0) row.emplace_back(g, v);
  }
  return row;
}

inline bool is_diagonal(const Eigen::SparseMatrix<double>& m) {
  for (int k = 0; k < m.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it) {
      if (it.row() != it.col() && it.value() != 0.0) return false;
    }
  }
  return true;
}

}  // namespace detail

/// One slot's capacity constraint: mean arrivals plus the (1 - gamma)-quantile
/// multiple of their standard deviation stay within capacity.  With no
/// randomness left the block degenerates to a plain linear row.
inline ConicProgram::SocBlock soc_constraint(const SlotConstraintBlocks& blk, double capacity,
                                             double gamma) {
  CCConfig{gamma}.validate();
  double phi_bar = detail::norm_quantile(1.0 - gamma);
  int rows2n = static_cast<int>(blk.A.rows());
  int cols = static_cast<int>(blk.A.cols());

  // Mean row: mu' * diag(d) * A, composed onto global variables.
  Eigen::VectorXd weights = blk.mu.cwiseProduct(blk.d_tilde);
  Eigen::VectorXd mean_stacked = Eigen::VectorXd::Zero(cols);
  for (int r = 0; r < rows2n; ++r) {
    double w = weights[r];
    if (w == 0.0) continue;
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(blk.A, r); it; ++it) {
      mean_stacked[it.col()] += w * it.value();
    }
  }
  SparseRow mean = detail::compose_stacked(mean_stacked, blk.stacked_index);

  ConicProgram::SocBlock soc;
  soc.bound_offset = capacity;
  soc.bound_terms.reserve(mean.size());
  for (auto [v, cf] : mean) soc.bound_terms.emplace_back(v, -cf);

  auto add_norm_row = [&](const Eigen::VectorXd& stacked) {
    SparseRow row = detail::compose_stacked(stacked, blk.stacked_index);
    if (row.empty()) return;
    for (auto& [v, cf] : row) cf *= phi_bar;
    soc.norm_rows.push_back(std::move(row));
    soc.norm_offset.push_back(0.0);
  };

  if (detail::is_diagonal(blk.Sigma)) {
    for (int r = 0; r < rows2n; ++r) {
      double var = blk.Sigma.coeff(r, r);
      if (var <= 0.0) continue;
      double scale = std::sqrt(var) * blk.d_tilde[r];
      Eigen::VectorXd stacked = Eigen::VectorXd::Zero(cols);
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(blk.A, r); it; ++it) {
        stacked[it.col()] = scale * it.value();
      }
      add_norm_row(stacked);
    }
  } else {
    // General covariance: symmetric square root, rows of S^(1/2) diag(d) A.
    Eigen::MatrixXd dense = Eigen::MatrixXd(blk.Sigma);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
    if (es.info() != Eigen::Success) throw InputError("soc_constraint: covariance decomposition failed");
    Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    Eigen::MatrixXd root = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
    Eigen::MatrixXd da = blk.d_tilde.asDiagonal() * Eigen::MatrixXd(blk.A);
    Eigen::MatrixXd rows = root * da;
    double scale = rows.cwiseAbs().maxCoeff();
    for (int r = 0; r < rows2n; ++r) {
      Eigen::VectorXd stacked = rows.row(r).transpose();
      if (stacked.cwiseAbs().maxCoeff() <= 1e-14 * std::max(scale, 1.0)) continue;
      add_norm_row(stacked);
    }
  }
  return soc;
}

/// Second-order cone program: the deterministic objective and assignment
/// rows, with each slot's capacity row replaced by its chance constraint.
template <typename BetaLike>
inline PolicyResult solve_chance_constrained(const Schedule& sched, const CostMatrix& costs,
                                             const BetaLike& beta,
                                             const ComplianceModel& compliance,
                                             const CCConfig& config,
                                             const SolverOptions& opt = {}) {
  config.validate();
  compliance.validate();
  VarMap vars(sched);
  ConicProgram cp(vars.num_vars());
  for (int i = 0; i < sched.num_flights(); ++i) {
    const Flight& f = sched.flights()[static_cast<std::size_t>(i)];
    SparseRow assign;
    for (int t = f.window_begin(); t < f.dep; ++t) {
      int v = vars.var(i, t);
      cp.set_lower_bound(v, 0.0);
      cp.set_objective_term(v, static_cast<double>(f.seats) * costs(i, t));
      assign.emplace_back(v, 1.0);
    }
    cp.add_equality(std::move(assign), 1.0);
  }
  for (int t = 0; t < sched.grid().num_slots; ++t) {
    SlotConstraintBlocks blk = build_slot_blocks(sched, beta, compliance, vars, t);
    ConicProgram::SocBlock soc = soc_constraint(blk, sched.capacity(t), config.gamma);
    if (soc.bound_terms.empty() && soc.norm_rows.empty()) continue;  // no flight active here
    cp.add_soc(std::move(soc));
  }
  SolveResult sol = cp.solve(opt);
  return detail::finish_policy_solve(sched, costs, vars, sol, PolicySource::chance_constrained);
}

}  // namespace slotrec
