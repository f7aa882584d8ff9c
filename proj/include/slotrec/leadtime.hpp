#pragma once

#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "slotrec/csv.hpp"
#include "slotrec/detail/gauss.hpp"

namespace slotrec {

/// Skew-normal model of how many minutes before departure passengers show up
/// at security when nobody tells them anything. Defaults fit a typical
/// "about an hour ahead, with a long early tail" pattern.
struct SkewNormalParams {
  double location = 64.0;  // minutes before departure
  double scale = 30.0;
  double shape = 3.0;

  void validate() const {
    if (!(scale > 0.0)) throw InputError("SkewNormalParams: scale must be positive");
    if (!std::isfinite(location) || !std::isfinite(shape)) {
      throw InputError("SkewNormalParams: non-finite parameter");
    }
  }
};

inline double skewnormal_pdf(double x, const SkewNormalParams& p) {
  double z = (x - p.location) / p.scale;
  return 2.0 / p.scale * detail::norm_pdf(z) * detail::norm_cdf(p.shape * z);
}

/// Probability mass over arrival lead times measured in whole slots.
/// mass(k) is the chance a passenger shows up k slots before departure,
/// k = 1..max_lead; masses sum to 1.
class BetaVector {
 public:
  BetaVector() = default;
  explicit BetaVector(std::vector<double> mass) : mass_(std::move(mass)) {
    if (mass_.empty()) throw InputError("BetaVector: empty mass vector");
    double sum = 0.0;
    for (double m : mass_) {
      if (!(m >= 0.0)) throw InputError("BetaVector: negative or NaN mass");
      sum += m;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      throw InputError("BetaVector: masses must sum to 1 within 1e-12");
    }
  }

  int max_lead() const { return static_cast<int>(mass_.size()); }

  /// Mass at lead k slots; zero outside 1..max_lead.
  double operator()(int k) const {
    if (k < 1 || k > max_lead()) return 0.0;
    return mass_[static_cast<std::size_t>(k - 1)];
  }

  const std::vector<double>& raw() const { return mass_; }

 private:
  std::vector<double> mass_;
};

struct DiscretizeOptions {
  int max_lead_slots = 16;
  int slot_minutes = 15;
  double quadrature_tol = 1e-10;  // absolute, per slot integral
  double min_captured_mass = 0.5; // refuse silly truncations
};

/// Integrate the continuous lead-time density over each slot-sized bin
/// (0, M*slot_minutes], then renormalize the captured mass to 1.
inline BetaVector discretize_leadtime(const SkewNormalParams& p,
                                      const DiscretizeOptions& opt = {}) {
  p.validate();
  if (opt.max_lead_slots < 1) throw InputError("discretize_leadtime: max_lead_slots must be >= 1");
  if (opt.slot_minutes < 1) throw InputError("discretize_leadtime: slot_minutes must be >= 1");
  std::vector<double> mass(static_cast<std::size_t>(opt.max_lead_slots), 0.0);
  double captured = 0.0;
  for (int k = 1; k <= opt.max_lead_slots; ++k) {
    double lo = double((k - 1) * opt.slot_minutes);
    double hi = double(k * opt.slot_minutes);
    double v = detail::adaptive_simpson([&](double x) { return skewnormal_pdf(x, p); }, lo, hi,
                                        opt.quadrature_tol);
    v = std::max(v, 0.0);
    mass[static_cast<std::size_t>(k - 1)] = v;
    captured += v;
  }
  if (captured < opt.min_captured_mass) {
    throw InputError("discretize_leadtime: truncation window captures less than half the "
                     "distribution; widen max_lead_slots or check parameters");
  }
  for (double& m : mass) m /= captured;
  // Exact unit sum, pushing the rounding residue onto the largest entry.
  double sum = std::accumulate(mass.begin(), mass.end(), 0.0);
  auto big = std::max_element(mass.begin(), mass.end());
  *big += 1.0 - sum;
  return BetaVector(std::move(mass));
}

/// Typical lead time in whole slots, used as the pivot between "early enough"
/// and "cutting it close" in the recommendation cost. Rounds half up.
inline int mean_leadtime_slots(const SkewNormalParams& p, int slot_minutes) {
  p.validate();
  if (slot_minutes < 1) throw InputError("mean_leadtime_slots: slot_minutes must be >= 1");
  return static_cast<int>(std::floor(p.location / double(slot_minutes) + 0.5));
}

/// Load a lead-time mass function from CSV (`k,mass`). Masses must already sum
/// to 1 within 1e-6; small residue is renormalized away.
inline BetaVector load_beta_file(const std::string& path, int max_lead_slots) {
  if (max_lead_slots < 1) throw InputError("load_beta_file: max_lead_slots must be >= 1");
  std::vector<double> mass(static_cast<std::size_t>(max_lead_slots), 0.0);
  std::vector<bool> seen(static_cast<std::size_t>(max_lead_slots), false);
  for (const auto& row : csv::read_file(path, {"k", "mass"})) {
    const std::string where = path + ":" + std::to_string(row.line_no);
    if (row.fields.size() != 2) throw InputError(where + ": expected 2 fields");
    long k = csv::parse_long(row.fields[0], path, row.line_no);
    double m = csv::parse_double(row.fields[1], path, row.line_no);
    if (k < 1 || k > max_lead_slots) throw InputError(where + ": lead k out of range");
    if (seen[static_cast<std::size_t>(k - 1)]) throw InputError(where + ": duplicate lead k");
    if (m < 0.0) throw InputError(where + ": negative mass");
    seen[static_cast<std::size_t>(k - 1)] = true;
    mass[static_cast<std::size_t>(k - 1)] = m;
  }
  double sum = std::accumulate(mass.begin(), mass.end(), 0.0);
  if (std::abs(sum - 1.0) > 1e-6) {
    throw InputError(path + ": masses sum to " + std::to_string(sum) + ", expected 1 within 1e-6");
  }
  for (double& m : mass) m /= sum;
  double s2 = std::accumulate(mass.begin(), mass.end(), 0.0);
  auto big = std::max_element(mass.begin(), mass.end());
  *big += 1.0 - s2;
  return BetaVector(std::move(mass));
}

/// Shared lead-time behaviour with optional per-flight overrides.
class BetaModel {
 public:
  BetaModel() = default;
  BetaModel(const BetaVector& shared) : shared_(shared) {}  // NOLINT(google-explicit-constructor)

  void set_override(int flight_index, BetaVector beta) {
    if (flight_index < 0) throw InputError("BetaModel: negative flight index");
    if (static_cast<std::size_t>(flight_index) >= overrides_.size()) {
      overrides_.resize(static_cast<std::size_t>(flight_index) + 1);
    }
    overrides_[static_cast<std::size_t>(flight_index)] = std::move(beta);
  }

  const BetaVector& for_flight(int flight_index) const {
    if (flight_index >= 0 && static_cast<std::size_t>(flight_index) < overrides_.size() &&
        overrides_[static_cast<std::size_t>(flight_index)].has_value()) {
      return *overrides_[static_cast<std::size_t>(flight_index)];
    }
    return shared_;
  }

  const BetaVector& shared() const { return shared_; }

 private:
  BetaVector shared_;
  std::vector<std::optional<BetaVector>> overrides_;
};

/// Uniform access to lead-time mass for code generic over shared vs
/// per-flight models.
inline double beta_at(const BetaVector& b, int /*flight_index*/, int lead) { return b(lead); }
inline double beta_at(const BetaModel& m, int flight_index, int lead) {
  return m.for_flight(flight_index)(lead);
}

}  // namespace slotrec
