#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace slotrec::detail {

inline double norm_pdf(double x) {
  static const double inv_sqrt_2pi = 0.3989422804014326779;
  return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

inline double norm_cdf(double x) {
  return 0.5 * std::erfc(-x * M_SQRT1_2);
}

/// Inverse standard normal CDF.
///
/// Acklam's rational approximation refined with two Halley steps against
/// erfc, giving full double accuracy over (0, 1).
inline double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("norm_quantile: p must lie in (0, 1)");
  }
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  double x;
  if (p < p_low) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    double q = p - 0.5;
    double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  for (int i = 0; i < 2; ++i) {
    double e = norm_cdf(x) - p;
    double u = e / norm_pdf(x);
    x -= u / (1.0 + 0.5 * x * u);  // Halley
  }
  return x;
}

/// Adaptive Simpson quadrature on [lo, hi] with absolute tolerance.
template <typename F>
double adaptive_simpson(F&& f, double lo, double hi, double abs_tol, int max_depth = 40) {
  struct Impl {
    const std::remove_reference_t<F>& f;
    int max_depth;
    double recurse(double a, double b, double fa, double fm, double fb, double whole,
                   double tol, int depth) const {
      double m = 0.5 * (a + b);
      double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
      double flm = f(lm), frm = f(rm);
      double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
      double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
      double delta = left + right - whole;
      if (depth >= max_depth || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
      }
      return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
             recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
    }
  };
  double fa = f(lo), fb = f(hi), fm = f(0.5 * (lo + hi));
  double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
  return Impl{f, max_depth}.recurse(lo, hi, fa, fm, fb, whole, abs_tol, 0);
}

}  // namespace slotrec::detail
