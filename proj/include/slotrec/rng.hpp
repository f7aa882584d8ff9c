#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace slotrec {

/// Deterministic random stream with cheap substream derivation.
///
/// All randomness in the library flows through this type so that a single
/// master seed reproduces every draw bit-for-bit, regardless of how work is
/// split across threads.  Substreams are derived by hashing the parent key
/// with a list of integer tags (e.g. {purpose, sweep point, replication}),
/// which keeps parallel replications independent of execution order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix(seed)) {}

  /// Derive an independent stream from a seed and a tag path.
  static Rng substream(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
    std::uint64_t key = mix(seed);
    for (std::uint64_t t : tags) key = mix(key ^ mix(t + 0x9e3779b97f4a7c15ULL));
    return Rng(key);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal deviate (Box-Muller, pair cached).
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = uniform();
    double u2 = uniform();
    // Avoid log(0); the shift keeps u1 in (0, 1].
    double r = std::sqrt(-2.0 * std::log(1.0 - u1));
    double a = 2.0 * M_PI * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  /// Integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Rejection-free is not required; modulo bias is negligible for n << 2^64
    // but we still reject to keep the stream well-defined for any n.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % n;
  }

  /// Sample an index from unnormalized nonnegative weights by inverse CDF.
  std::size_t categorical(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = uniform() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return i;
    }
    return weights.size() - 1;  // u landed on accumulated rounding slack
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  // SplitMix64 finalizer; decorrelates consecutive seeds and tag values.
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

/// Tag constants for substream derivation; one per randomized pipeline stage.
namespace stream_tag {
inline constexpr std::uint64_t synth_schedule = 1;
inline constexpr std::uint64_t policy_sim = 2;
inline constexpr std::uint64_t baseline_sim = 3;
inline constexpr std::uint64_t compliance_draw = 4;
inline constexpr std::uint64_t sweep_point = 5;
}  // namespace stream_tag

}  // namespace slotrec
