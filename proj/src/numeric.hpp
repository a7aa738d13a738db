#pragma once

// Scalar helpers shared by the library sources. Not installed.

#include <algorithm>
#include <cmath>

namespace qbif::detail {

inline constexpr double kProbClamp = 1e-12;

inline double clamp_prob(double p) { return std::clamp(p, kProbClamp, 1.0 - kProbClamp); }

/// 1 / (1 + exp(-z)) without overflow.
inline double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

/// ln(x / (1 - x)) on the clamped probability.
inline double logit(double x) {
  x = clamp_prob(x);
  return std::log(x) - std::log1p(-x);
}

/// ln(1/x - 1) = -logit(x). Near 1/2 it goes through log1p so that the value
/// keeps full relative precision; it is exactly zero only at x == 1/2.
inline double log_odds_inv(double x) {
  x = clamp_prob(x);
  if (std::abs(x - 0.5) < 0.25) return std::log1p((1.0 - 2.0 * x) / x);
  return std::log1p(-x) - std::log(x);
}

/// Bisection on f over [lo, hi] where f(lo) and f(hi) differ in sign.
/// Stops when the bracket is narrower than tol or after max_iter halvings.
template <class F>
double bisect(F&& f, double lo, double hi, double flo, double tol, int max_iter = 200) {
  for (int i = 0; i < max_iter && hi - lo > tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace qbif::detail
