#pragma once

// Recommendation policies and the deterministic slot-assignment program:
// spread each flight's passengers over its recommendation window at minimum
// earliness cost while keeping every slot's expected arrivals within
// checkpoint capacity.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "slotrec/conic.hpp"
#include "slotrec/csv.hpp"
#include "slotrec/leadtime.hpp"
#include "slotrec/schedule.hpp"

namespace slotrec {

/// Decision-variable numbering: one variable per (flight, slot in its
/// recommendation window), windows laid out flight-major.
class VarMap {
 public:
  explicit VarMap(const Schedule& sched) {
    offset_.reserve(static_cast<std::size_t>(sched.num_flights()));
    int n = 0;
    for (const Flight& f : sched.flights()) {
      offset_.push_back(n);
      begin_.push_back(f.window_begin());
      len_.push_back(f.window_len);
      n += f.window_len;
    }
    num_vars_ = n;
    flight_of_.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < sched.num_flights(); ++i) {
      for (int k = 0; k < len_[static_cast<std::size_t>(i)]; ++k) {
        flight_of_[static_cast<std::size_t>(offset_[static_cast<std::size_t>(i)] + k)] = i;
      }
    }
  }

  int num_vars() const { return num_vars_; }

  /// Variable index for x[flight][slot], or -1 when the slot is outside the
  /// flight's window.
  int var(int flight, int slot) const {
    auto i = static_cast<std::size_t>(flight);
    int k = slot - begin_[i];
    if (k < 0 || k >= len_[i]) return -1;
    return offset_[i] + k;
  }

  std::pair<int, int> flight_slot(int v) const {
    int i = flight_of_[static_cast<std::size_t>(v)];
    auto ii = static_cast<std::size_t>(i);
    return {i, begin_[ii] + (v - offset_[ii])};
  }

 private:
  std::vector<int> offset_, begin_, len_, flight_of_;
  int num_vars_ = 0;
};

/// Earliness cost of recommending slot t to flight i, defined on the window
/// only. Leads at or beyond the typical lead grow quadratically (passengers
/// sent needlessly early), shorter leads cost their slot count linearly.
class CostMatrix {
 public:
  CostMatrix() = default;

  double operator()(int flight, int slot) const {
    auto i = static_cast<std::size_t>(flight);
    int k = slot - begin_[i];
    if (k < 0 || k >= static_cast<int>(values_[i].size())) {
      throw InputError("CostMatrix: slot outside the flight's window");
    }
    return values_[i][static_cast<std::size_t>(k)];
  }

  int num_flights() const { return static_cast<int>(values_.size()); }

  friend CostMatrix build_costs(const Schedule&, int);

 private:
  std::vector<int> begin_;
  std::vector<std::vector<double>> values_;
};

/// mean_lead_slots is the pivot between the quadratic and linear branches.
inline CostMatrix build_costs(const Schedule& sched, int mean_lead_slots) {
  if (mean_lead_slots < 1) throw InputError("build_costs: mean lead must be at least one slot");
  CostMatrix cm;
  for (const Flight& f : sched.flights()) {
    cm.begin_.push_back(f.window_begin());
    std::vector<double> row(static_cast<std::size_t>(f.window_len));
    for (int k = 0; k < f.window_len; ++k) {
      int t = f.window_begin() + k;
      int lead = f.dep - t;  // slots ahead of departure, in [1, window_len]
      row[static_cast<std::size_t>(k)] =
          lead >= mean_lead_slots ? double(lead) * double(lead) : double(lead);
    }
    cm.values_.push_back(std::move(row));
  }
  return cm;
}

enum class PolicySource { deterministic, chance_constrained, baseline, imported };

inline const char* to_string(PolicySource s) {
  switch (s) {
    case PolicySource::deterministic: return "deterministic";
    case PolicySource::chance_constrained: return "chance_constrained";
    case PolicySource::baseline: return "baseline";
    case PolicySource::imported: return "imported";
  }
  return "unknown";
}

/// Per-flight distribution of recommended arrival slots.
class Policy {
 public:
  Policy() = default;
  Policy(const Schedule& sched, PolicySource source)
      : source_(source),
        num_slots_(sched.grid().num_slots),
        x_(static_cast<std::size_t>(sched.num_flights()),
           std::vector<double>(static_cast<std::size_t>(sched.grid().num_slots), 0.0)) {}

  PolicySource source() const { return source_; }
  SolveStats& solver_stats() { return stats_; }
  const SolveStats& solver_stats() const { return stats_; }

  double operator()(int flight, int slot) const {
    return x_[static_cast<std::size_t>(flight)][static_cast<std::size_t>(slot)];
  }
  void set(int flight, int slot, double v) {
    x_[static_cast<std::size_t>(flight)][static_cast<std::size_t>(slot)] = v;
  }

  int num_flights() const { return static_cast<int>(x_.size()); }
  int num_slots() const { return num_slots_; }

  /// Fractions nonnegative, each flight's mass sums to 1, support inside the
  /// flight's window.
  void validate(const Schedule& sched, double tol = 1e-8) const {
    if (num_flights() != sched.num_flights()) {
      throw InputError("Policy: flight count does not match the schedule");
    }
    for (int i = 0; i < num_flights(); ++i) {
      const Flight& f = sched.flights()[static_cast<std::size_t>(i)];
      double sum = 0.0;
      for (int t = 0; t < num_slots_; ++t) {
        double v = (*this)(i, t);
        if (v < -tol) throw InputError("Policy: negative fraction for flight " + f.id);
        bool in_window = t >= f.window_begin() && t < f.dep;
        if (!in_window && v != 0.0) {
          throw InputError("Policy: mass outside the window for flight " + f.id);
        }
        sum += v;
      }
      if (std::abs(sum - 1.0) > tol) {
        throw InputError("Policy: fractions for flight " + f.id + " sum to " +
                         std::to_string(sum));
      }
    }
  }

 private:
  PolicySource source_ = PolicySource::imported;
  int num_slots_ = 0;
  std::vector<std::vector<double>> x_;
  SolveStats stats_;
};

/// Every passenger follows the no-control arrival distribution.
template <typename BetaLike>
inline Policy baseline_policy(const Schedule& sched, const BetaLike& beta) {
  Policy p(sched, PolicySource::baseline);
  for (int i = 0; i < sched.num_flights(); ++i) {
    const Flight& f = sched.flights()[static_cast<std::size_t>(i)];
    double sum = 0.0;
    for (int t = f.window_begin(); t < f.dep; ++t) sum += beta_at(beta, i, f.dep - t);
    if (sum <= 0.0) throw InputError("baseline_policy: no arrival mass inside the window");
    for (int t = f.window_begin(); t < f.dep; ++t) {
      p.set(i, t, beta_at(beta, i, f.dep - t) / sum);
    }
  }
  return p;
}

inline void save_policy(const Policy& policy, const Schedule& sched, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write file: " + path);
  out << "flight_id,slot,fraction\n";
  for (int i = 0; i < policy.num_flights(); ++i) {
    const Flight& f = sched.flights()[static_cast<std::size_t>(i)];
    for (int t = 0; t < policy.num_slots(); ++t) {
      double v = policy(i, t);
      if (v < 1e-9) continue;
      out << f.id << ',' << t << ',' << csv::fmt(v) << '\n';
    }
  }
}

inline Policy load_policy(const std::string& path, const Schedule& sched,
                          PolicySource source = PolicySource::imported) {
  Policy p(sched, source);
  std::vector<std::string> ids;
  for (const Flight& f : sched.flights()) ids.push_back(f.id);
  for (const auto& row : csv::read_file(path, {"flight_id", "slot", "fraction"})) {
    const std::string where = path + ":" + std::to_string(row.line_no);
    if (row.fields.size() != 3) throw InputError(where + ": expected 3 fields");
    auto it = std::find(ids.begin(), ids.end(), row.fields[0]);
    if (it == ids.end()) throw InputError(where + ": unknown flight id " + row.fields[0]);
    int i = static_cast<int>(it - ids.begin());
    long t = csv::parse_long(row.fields[1], path, row.line_no);
    double v = csv::parse_double(row.fields[2], path, row.line_no);
    if (t < 0 || t >= sched.grid().num_slots) throw InputError(where + ": slot out of range");
    if (v < 0.0) throw InputError(where + ": negative fraction");
    p.set(i, static_cast<int>(t), v);
  }
  // Fractions dropped at export (below 1e-9) leave a tiny mass deficit;
  // restore exact unit rows before the strict validation.
  for (int i = 0; i < p.num_flights(); ++i) {
    double sum = 0.0;
    for (int t = 0; t < p.num_slots(); ++t) sum += p(i, t);
    if (std::abs(sum - 1.0) > 1e-6) {
      throw InputError(path + ": fractions for flight " +
                       sched.flights()[static_cast<std::size_t>(i)].id + " sum to " +
                       std::to_string(sum));
    }
    for (int t = 0; t < p.num_slots(); ++t) {
      if (p(i, t) != 0.0) p.set(i, t, p(i, t) / sum);
    }
  }
  p.validate(sched);
  return p;
}

/// Window interval whose committed demand cannot fit its total capacity.
struct OverloadInterval {
  int begin = 0;
  int end = 0;  // inclusive
  double demand = 0.0;
  double capacity = 0.0;
};

/// Exact feasibility diagnosis for window-interval assignment: the program
/// admits a solution iff for every slot interval, flights whose windows lie
/// entirely inside have total seats at most the interval's total capacity.
/// Returns the most overloaded intervals (strongest violations first).
inline std::vector<OverloadInterval> find_overload_intervals(const Schedule& sched,
                                                             int max_reports = 5) {
  int T = sched.grid().num_slots;
  std::vector<double> cap_prefix(static_cast<std::size_t>(T) + 1, 0.0);
  for (int t = 0; t < T; ++t) {
    cap_prefix[static_cast<std::size_t>(t) + 1] = cap_prefix[static_cast<std::size_t>(t)] + sched.capacity(t);
  }
  // demand_at[a][b] accumulation via per-window buckets: window [wb, dep-1].
  std::vector<std::vector<std::pair<int, double>>> by_begin(static_cast<std::size_t>(T));
  for (const Flight& f : sched.flights()) {
    by_begin[static_cast<std::size_t>(f.window_begin())].emplace_back(f.dep - 1,
                                                                      double(f.seats));
  }
  std::vector<OverloadInterval> out;
  for (int a = 0; a < T; ++a) {
    // Demand of windows contained in [a, b], swept over b.
    std::vector<double> end_demand(static_cast<std::size_t>(T), 0.0);
    for (int w = a; w < T; ++w) {
      for (auto [e, d] : by_begin[static_cast<std::size_t>(w)]) {
        end_demand[static_cast<std::size_t>(e)] += d;
      }
    }
    double demand = 0.0;
    for (int b = a; b < T; ++b) {
      demand += end_demand[static_cast<std::size_t>(b)];
      double cap = cap_prefix[static_cast<std::size_t>(b) + 1] - cap_prefix[static_cast<std::size_t>(a)];
      if (demand > cap + 1e-9) {
        out.push_back({a, b, demand, cap});
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const OverloadInterval& u, const OverloadInterval& v) {
    double du = u.demand - u.capacity, dv = v.demand - v.capacity;
    if (du != dv) return du > dv;
    return u.end - u.begin < v.end - v.begin;  // tightest interval first on ties
  });
  if (static_cast<int>(out.size()) > max_reports) out.resize(static_cast<std::size_t>(max_reports));
  return out;
}

struct PolicyResult {
  SolveStatus status = SolveStatus::numerical_failure;
  std::optional<Policy> policy;
  double objective = std::numeric_limits<double>::quiet_NaN();
  SolveStats stats;
  std::vector<OverloadInterval> overloads;  // populated when infeasible
  std::string message;
};

namespace detail {

/// Shared extraction: clamp solver dust, renormalize rows exactly, validate.
inline PolicyResult finish_policy_solve(const Schedule& sched, const CostMatrix& costs,
                                        const VarMap& vars, const SolveResult& sol,
                                        PolicySource source) {
  PolicyResult out;
  out.status = sol.status;
  out.stats = sol.stats;
  if (sol.status == SolveStatus::infeasible) {
    out.overloads = find_overload_intervals(sched);
    std::string msg = "no assignment fits the capacity profile";
    if (!out.overloads.empty()) {
      const OverloadInterval& w = out.overloads.front();
      msg += "; worst interval: slots " + std::to_string(w.begin) + ".." + std::to_string(w.end) +
             " demand " + std::to_string(static_cast<long>(w.demand)) + " > capacity " +
             std::to_string(static_cast<long>(w.capacity));
    }
    out.message = msg;
    return out;
  }
  if (sol.status != SolveStatus::optimal) {
    out.message = std::string("solver returned ") + to_string(sol.status);
    return out;
  }
  Policy p(sched, source);
  for (int i = 0; i < sched.num_flights(); ++i) {
    const Flight& f = sched.flights()[static_cast<std::size_t>(i)];
    double sum = 0.0;
    for (int t = f.window_begin(); t < f.dep; ++t) {
      double v = sol.x[static_cast<std::size_t>(vars.var(i, t))];
      if (v < 1e-12) v = 0.0;
      p.set(i, t, v);
      sum += v;
    }
    for (int t = f.window_begin(); t < f.dep; ++t) {
      if (p(i, t) != 0.0) p.set(i, t, p(i, t) / sum);
    }
  }
  p.validate(sched);
  double obj = 0.0;
  for (int i = 0; i < sched.num_flights(); ++i) {
    const Flight& f = sched.flights()[static_cast<std::size_t>(i)];
    for (int t = f.window_begin(); t < f.dep; ++t) {
      obj += double(f.seats) * costs(i, t) * p(i, t);
    }
  }
  p.solver_stats() = sol.stats;
  out.policy = std::move(p);
  out.objective = obj;
  out.message = "optimal";
  return out;
}

}  // namespace detail

/// Linear program: minimize seat-weighted earliness cost subject to full
/// assignment per flight and per-slot capacity on expected arrivals under
/// full compliance.
inline PolicyResult solve_deterministic(const Schedule& sched, const CostMatrix& costs,
                                        const SolverOptions& opt = {}) {
  VarMap vars(sched);
  ConicProgram cp(vars.num_vars());
  for (int i = 0; i < sched.num_flights(); ++i) {
    const Flight& f = sched.flights()[static_cast<std::size_t>(i)];
    SparseRow assign;
    for (int t = f.window_begin(); t < f.dep; ++t) {
      int v = vars.var(i, t);
      cp.set_lower_bound(v, 0.0);
      cp.set_objective_term(v, double(f.seats) * costs(i, t));
      assign.emplace_back(v, 1.0);
    }
    cp.add_equality(std::move(assign), 1.0);
  }
  int T = sched.grid().num_slots;
  for (int t = 0; t < T; ++t) {
    SparseRow row;
    for (int i = 0; i < sched.num_flights(); ++i) {
      int v = vars.var(i, t);
      if (v >= 0) row.emplace_back(v, double(sched.flights()[static_cast<std::size_t>(i)].seats));
    }
    if (!row.empty()) cp.add_upper_bound_row(std::move(row), sched.capacity(t));
  }
  SolveResult sol = cp.solve(opt);
  return detail::finish_policy_solve(sched, costs, vars, sol, PolicySource::deterministic);
}

}  // namespace slotrec
