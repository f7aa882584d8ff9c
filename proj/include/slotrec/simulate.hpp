#pragma once

// Monte-Carlo passenger arrival generation: sample each flight's realized
// compliance share per recommended slot, blend the recommendation with the
// natural lead-time pattern into a per-flight arrival pmf, then draw every
// passenger's arrival slot from it.

#include <cmath>
#include <cstdint>
#include <vector>

#include "slotrec/cc_model.hpp"
#include "slotrec/det_model.hpp"
#include "slotrec/queueing.hpp"
#include "slotrec/rng.hpp"

namespace slotrec {

struct SimConfig {
  std::uint64_t seed = 20240501;
  int n_replications = 100;
  bool clamp_alpha = true;          // keep sampled shares inside [0, 1]
  bool algorithm1_literal = false;  // printed-variant weighting; masses no longer sum to 1
  bool record_passengers = false;   // keep per-passenger (flight, slot) records

  void validate() const {
    if (n_replications < 1) throw InputError("SimConfig: n_replications must be >= 1");
  }
};

/// One flight's realized arrival pmf for one replication.  Samples the
/// compliance share for every slot in the flight's window (ascending, one
/// normal draw each), then splits mass between the recommended slot and the
/// lead-time fallback.  With the literal variant the fallback is weighted by
/// the share itself instead of its complement, so the masses need not sum
/// to 1; otherwise the sum is 1 up to rounding whenever the lead support
/// fits the grid.
template <typename BetaLike>
inline std::vector<double> realized_arrival_pmf(const Policy& policy, const Schedule& sched,
                                                const BetaLike& beta,
                                                const ComplianceModel& compliance, int flight,
                                                Rng& rng, const SimConfig& config) {
  const Flight& f = sched.flights()[static_cast<std::size_t>(flight)];
  int T = sched.grid().num_slots;
  std::vector<double> pmf(static_cast<std::size_t>(T), 0.0);
  double fallback = 0.0;
  for (int s = f.window_begin(); s < f.dep; ++s) {
    double alpha = rng.normal(compliance.mu(flight, s), compliance.sigma(flight, s));
    if (config.clamp_alpha) alpha = std::min(1.0, std::max(0.0, alpha));
    double x = policy(flight, s);
    if (x == 0.0) continue;
    pmf[static_cast<std::size_t>(s)] += x * alpha;
    fallback += config.algorithm1_literal ? x * alpha : x * (1.0 - alpha);
  }
  for (int lead = 1; lead <= f.dep; ++lead) {
    double b = beta_at(beta, flight, lead);
    if (b > 0.0) pmf[static_cast<std::size_t>(f.dep - lead)] += fallback * b;
  }
  return pmf;
}

namespace detail {

/// Negative masses only appear with clamping disabled or the literal
/// variant; drawing needs a genuine pmf, so clip and renormalize a copy.
inline const std::vector<double>& drawable_pmf(const std::vector<double>& pmf,
                                               std::vector<double>& scratch) {
  double sum = 0.0;
  bool clean = true;
  for (double v : pmf) {
    if (v < 0.0) clean = false;
    sum += v;
  }
  if (clean && std::abs(sum - 1.0) <= 1e-9) return pmf;
  scratch.resize(pmf.size());
  double pos = 0.0;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    scratch[i] = std::max(pmf[i], 0.0);
    pos += scratch[i];
  }
  if (pos <= 0.0) throw InputError("simulate: realized arrival masses vanished");
  for (double& v : scratch) v /= pos;
  return scratch;
}

}  // namespace detail

/// One replication's arrival stream.  Deterministic given (seed, channel,
/// replication); independent of how other replications are scheduled.
template <typename BetaLike>
inline ArrivalStream simulate_replication(const Policy& policy, const Schedule& sched,
                                          const BetaLike& beta,
                                          const ComplianceModel& compliance,
                                          const SimConfig& config, int replication,
                                          std::uint64_t channel = stream_tag::policy_sim) {
  config.validate();
  Rng rng = Rng::substream(config.seed, {channel, static_cast<std::uint64_t>(replication)});
  ArrivalStream stream;
  stream.counts.assign(static_cast<std::size_t>(sched.grid().num_slots), 0.0);
  std::vector<double> scratch;
  for (int i = 0; i < sched.num_flights(); ++i) {
    std::vector<double> pmf = realized_arrival_pmf(policy, sched, beta, compliance, i, rng, config);
    const std::vector<double>& draw = detail::drawable_pmf(pmf, scratch);
    long seats = sched.flights()[static_cast<std::size_t>(i)].seats;
    for (long pax = 0; pax < seats; ++pax) {
      int slot = static_cast<int>(rng.categorical(draw));
      stream.add(slot, 1.0);
      if (config.record_passengers) stream.records.push_back({i, slot});
    }
  }
  return stream;
}

template <typename BetaLike>
inline std::vector<ArrivalStream> generate_arrivals(const Policy& policy, const Schedule& sched,
                                                    const BetaLike& beta,
                                                    const ComplianceModel& compliance,
                                                    const SimConfig& config,
                                                    std::uint64_t channel = stream_tag::policy_sim) {
  config.validate();
  std::vector<ArrivalStream> out;
  out.reserve(static_cast<std::size_t>(config.n_replications));
  for (int r = 0; r < config.n_replications; ++r) {
    out.push_back(simulate_replication(policy, sched, beta, compliance, config, r, channel));
  }
  return out;
}

/// No-control reference: everyone follows the natural lead-time pattern.
/// Same generator with the fallback distribution as the recommendation and
/// zero compliance, drawn from its own stream channel.
template <typename BetaLike>
inline std::vector<ArrivalStream> generate_baseline_arrivals(const Schedule& sched,
                                                             const BetaLike& beta,
                                                             const SimConfig& config) {
  Policy base = baseline_policy(sched, beta);
  ComplianceModel none = ComplianceModel::constant(sched, 0.0, 0.0);
  return generate_arrivals(base, sched, beta, none, config, stream_tag::baseline_sim);
}

/// Paired waiting-time comparison across replications, in passenger-hours.
struct TtsSummary {
  double mean = 0.0;
  double stderr_mean = 0.0;
  std::vector<double> per_replication;
};

inline TtsSummary tts_summary(const std::vector<ArrivalStream>& baseline,
                              const std::vector<ArrivalStream>& controlled,
                              const Schedule& sched) {
  if (baseline.size() != controlled.size() || baseline.empty()) {
    throw InputError("tts_summary: replication lists must be nonempty and equal length");
  }
  TtsSummary out;
  for (std::size_t r = 0; r < baseline.size(); ++r) {
    QueueTrace tb = fcfs_evaluate(baseline[r], sched);
    QueueTrace tc = fcfs_evaluate(controlled[r], sched);
    out.per_replication.push_back(total_time_savings(tb, tc));
  }
  double n = static_cast<double>(out.per_replication.size());
  for (double v : out.per_replication) out.mean += v;
  out.mean /= n;
  if (out.per_replication.size() > 1) {
    double ss = 0.0;
    for (double v : out.per_replication) ss += (v - out.mean) * (v - out.mean);
    out.stderr_mean = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return out;
}

/// Direct Monte-Carlo estimate of each slot's overflow probability: sample
/// the compliance shares, evaluate the slot's arrival count, and count
/// exceedances.  This is the check that the chance constraints are supposed
/// to pass, so it deliberately re-derives the arrival count from the scalar
/// formula rather than reusing the constraint builder.
struct ViolationEstimate {
  std::vector<double> rate;
  int samples = 0;

  double max_rate() const {
    double m = 0.0;
    for (double r : rate) m = std::max(m, r);
    return m;
  }
};

template <typename BetaLike>
inline ViolationEstimate estimate_violation_rates(const Policy& policy, const Schedule& sched,
                                                  const BetaLike& beta,
                                                  const ComplianceModel& compliance,
                                                  int n_samples, std::uint64_t seed,
                                                  bool clamp_alpha = true) {
  if (n_samples < 1) throw InputError("estimate_violation_rates: n_samples must be >= 1");
  int T = sched.grid().num_slots;
  struct Term {
    int flight;
    int slot;
    double base;  // d * beta * (mass the flight will send regardless)
    double coef;  // d * (x_it - beta * total mass)
  };
  std::vector<std::vector<Term>> by_slot(static_cast<std::size_t>(T));
  for (int i = 0; i < sched.num_flights(); ++i) {
    const Flight& f = sched.flights()[static_cast<std::size_t>(i)];
    double d = static_cast<double>(f.seats);
    double share = 0.0;
    for (int s = f.window_begin(); s < f.dep; ++s) share += policy(i, s);
    for (int t = 0; t < T; ++t) {
      double b = beta_at(beta, i, f.dep - t);
      double x = policy(i, t);
      if (x == 0.0 && b == 0.0) continue;
      by_slot[static_cast<std::size_t>(t)].push_back({i, t, d * b * share, d * (x - b * share)});
    }
  }
  std::vector<int> exceed(static_cast<std::size_t>(T), 0);
  for (int r = 0; r < n_samples; ++r) {
    Rng rng = Rng::substream(seed, {stream_tag::compliance_draw, static_cast<std::uint64_t>(r)});
    for (int t = 0; t < T; ++t) {
      double y = 0.0;
      for (const Term& term : by_slot[static_cast<std::size_t>(t)]) {
        double alpha = rng.normal(compliance.mu(term.flight, term.slot),
                                  compliance.sigma(term.flight, term.slot));
        if (clamp_alpha) alpha = std::min(1.0, std::max(0.0, alpha));
        y += term.base + alpha * term.coef;
      }
      double cap = sched.capacity(t);
      if (y > cap + 1e-9 * std::max(1.0, cap)) ++exceed[static_cast<std::size_t>(t)];
    }
  }
  ViolationEstimate est;
  est.samples = n_samples;
  est.rate.resize(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) {
    est.rate[static_cast<std::size_t>(t)] =
        static_cast<double>(exceed[static_cast<std::size_t>(t)]) / static_cast<double>(n_samples);
  }
  return est;
}

}  // namespace slotrec
