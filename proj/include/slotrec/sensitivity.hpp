#pragma once

// Parameter sweeps over the compliance model: vary the overflow budget gamma,
// the mean compliance, or its spread while holding everything else fixed,
// re-solve the chance-constrained program per point, and summarize each
// solution's cost, simulated time savings, realized overflow rates, and how
// much mass is pushed earlier than the typical lead.

#include <cmath>
#include <fstream>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "slotrec/cc_model.hpp"
#include "slotrec/det_model.hpp"
#include "slotrec/simulate.hpp"

namespace slotrec {

enum class SweepParameter { gamma, mu, sigma };

inline const char* to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::gamma: return "gamma";
    case SweepParameter::mu: return "mu";
    case SweepParameter::sigma: return "sigma";
  }
  return "unknown";
}

inline SweepParameter parse_sweep_parameter(const std::string& s) {
  if (s == "gamma") return SweepParameter::gamma;
  if (s == "mu") return SweepParameter::mu;
  if (s == "sigma") return SweepParameter::sigma;
  throw InputError("unknown sweep parameter: " + s + " (expected gamma, mu, or sigma)");
}

inline std::vector<double> default_sweep_values(SweepParameter p) {
  switch (p) {
    case SweepParameter::gamma: return {0.01, 0.05, 0.1};
    case SweepParameter::mu: return {0.5, 0.7, 0.9};
    case SweepParameter::sigma: return {0.1, 0.2, 0.3};
  }
  return {};
}

/// Everything held fixed across the sweep.
struct SweepBase {
  Schedule schedule{TimeGrid{}, {}, {}};
  BetaModel beta;
  ComplianceModel compliance;
  CCConfig cc;
  int mean_lead_slots = 4;  // cost pivot, also the "early" threshold below
};

struct SweepSpec {
  SweepParameter parameter = SweepParameter::gamma;
  std::vector<double> values;
  SweepBase base;
  int violation_samples = 2000;

  void validate() const {
    if (values.empty()) throw InputError("SweepSpec: empty value list");
    if (violation_samples < 1) throw InputError("SweepSpec: violation_samples must be >= 1");
    for (double v : values) {
      switch (parameter) {
        case SweepParameter::gamma:
          if (!(v > 0.0 && v < 0.5)) throw InputError("SweepSpec: gamma values must lie in (0, 0.5)");
          break;
        case SweepParameter::mu:
          if (!(v >= 0.0 && v <= 1.0)) throw InputError("SweepSpec: mu values must lie in [0, 1]");
          break;
        case SweepParameter::sigma:
          if (!(v >= 0.0)) throw InputError("SweepSpec: sigma values must be nonnegative");
          break;
      }
    }
    base.cc.validate();
    base.compliance.validate();
  }
};

/// Seat mass recommended earlier than the typical lead.
inline double early_assignment_mass(const Policy& policy, const Schedule& sched,
                                    int mean_lead_slots) {
  double mass = 0.0;
  for (int i = 0; i < sched.num_flights(); ++i) {
    const Flight& f = sched.flights()[static_cast<std::size_t>(i)];
    for (int t = f.window_begin(); t < f.dep; ++t) {
      if (f.dep - t > mean_lead_slots) mass += static_cast<double>(f.seats) * policy(i, t);
    }
  }
  return mass;
}

struct SweepRecord {
  SweepParameter parameter = SweepParameter::gamma;
  double value = 0.0;
  SolveStatus status = SolveStatus::numerical_failure;
  double objective = std::numeric_limits<double>::quiet_NaN();
  double tts_mean = std::numeric_limits<double>::quiet_NaN();
  double tts_stderr = std::numeric_limits<double>::quiet_NaN();
  double max_violation_rate = std::numeric_limits<double>::quiet_NaN();
  double early_mass = std::numeric_limits<double>::quiet_NaN();
};

/// Evaluate one grid point from scratch; the row depends only on (spec, sim,
/// index), so a standalone rerun reproduces it exactly.  The same seed is
/// reused across points on purpose: common random numbers keep cross-point
/// comparisons free of independent sampling noise.
inline SweepRecord run_sweep_point(const SweepSpec& spec, const SimConfig& sim, int index) {
  spec.validate();
  sim.validate();
  if (index < 0 || static_cast<std::size_t>(index) >= spec.values.size()) {
    throw InputError("run_sweep_point: index out of range");
  }
  double value = spec.values[static_cast<std::size_t>(index)];
  const Schedule& sched = spec.base.schedule;

  CCConfig cc = spec.base.cc;
  ComplianceModel compliance = spec.base.compliance;
  switch (spec.parameter) {
    case SweepParameter::gamma:
      cc.gamma = value;
      break;
    case SweepParameter::mu:
      for (int i = 0; i < compliance.num_flights(); ++i) {
        for (int t = 0; t < compliance.num_slots(); ++t) {
          compliance.set(i, t, value, compliance.sigma(i, t));
        }
      }
      break;
    case SweepParameter::sigma:
      for (int i = 0; i < compliance.num_flights(); ++i) {
        for (int t = 0; t < compliance.num_slots(); ++t) {
          compliance.set(i, t, compliance.mu(i, t), value);
        }
      }
      break;
  }

  SweepRecord rec;
  rec.parameter = spec.parameter;
  rec.value = value;
  CostMatrix costs = build_costs(sched, spec.base.mean_lead_slots);
  PolicyResult solved = solve_chance_constrained(sched, costs, spec.base.beta, compliance, cc);
  rec.status = solved.status;
  if (solved.status != SolveStatus::optimal) return rec;

  const Policy& policy = *solved.policy;
  rec.objective = solved.objective;
  rec.early_mass = early_assignment_mass(policy, sched, spec.base.mean_lead_slots);
  rec.max_violation_rate =
      estimate_violation_rates(policy, sched, spec.base.beta, compliance, spec.violation_samples,
                               sim.seed, sim.clamp_alpha)
          .max_rate();
  std::vector<ArrivalStream> controlled =
      generate_arrivals(policy, sched, spec.base.beta, compliance, sim);
  std::vector<ArrivalStream> baseline =
      generate_baseline_arrivals(sched, spec.base.beta, sim);
  TtsSummary tts = tts_summary(baseline, controlled, sched);
  rec.tts_mean = tts.mean;
  rec.tts_stderr = tts.stderr_mean;
  return rec;
}

/// All points in grid order.  Points are independent, so extra workers just
/// partition the index range; the result vector is always index-ordered.
inline std::vector<SweepRecord> run_sweep(const SweepSpec& spec, const SimConfig& sim,
                                          int jobs = 1) {
  spec.validate();
  sim.validate();
  int n = static_cast<int>(spec.values.size());
  std::vector<SweepRecord> out(static_cast<std::size_t>(n));
  if (jobs < 1) jobs = 1;
  jobs = std::min(jobs, n);
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = run_sweep_point(spec, sim, i);
    return out;
  }
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&, w]() {
      try {
        for (int i = w; i < n; i += jobs) {
          out[static_cast<std::size_t>(i)] = run_sweep_point(spec, sim, i);
        }
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (std::thread& t : workers) t.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

inline void save_sweep(const std::vector<SweepRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write file: " + path);
  out << "param,value,objective,tts_mean,tts_stderr,max_violation_rate,early_mass,status\n";
  for (const SweepRecord& r : records) {
    out << to_string(r.parameter) << ',' << csv::fmt(r.value) << ',' << csv::fmt(r.objective)
        << ',' << csv::fmt(r.tts_mean) << ',' << csv::fmt(r.tts_stderr) << ','
        << csv::fmt(r.max_violation_rate) << ',' << csv::fmt(r.early_mass) << ','
        << to_string(r.status) << '\n';
  }
}

}  // namespace slotrec
