#pragma once

#include <cmath>
#include <numbers>

namespace conesa {

/// Standard normal CDF via erfc, accurate in both tails.
inline double normal_cdf(double t) {
  return 0.5 * std::erfc(-t / std::numbers::sqrt2);
}

/// 1 - Phi(t) without cancellation.
inline double normal_sf(double t) {
  return 0.5 * std::erfc(t / std::numbers::sqrt2);
}

inline double normal_pdf(double t) {
  return std::exp(-0.5 * t * t) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
}

}  // namespace conesa
