#ifndef FRACPROP_GAMMAFN_HPP
#define FRACPROP_GAMMAFN_HPP

#include <cmath>
#include <limits>

namespace fracprop {

// Nonpositive-integer test for Gamma arguments. Series/expansion terms whose
// Gamma argument lands on a pole contribute exactly zero (1/Gamma vanishes).
inline bool gamma_pole(double x) {
  if (x > 0.5) return false;
  const double r = std::nearbyint(x);
  return r <= 0.0 && std::abs(x - r) <= 1e-12 * std::max(1.0, std::abs(x));
}

// Sign of Gamma(x) away from poles.
inline double gamma_sign(double x) {
  if (x > 0.0) return 1.0;
  // Gamma alternates sign between consecutive nonpositive integers.
  const auto f = static_cast<long long>(std::floor(x));
  return (f % 2 == 0) ? 1.0 : -1.0;
}

// log|Gamma(x)|; std::lgamma does not touch signgam through this wrapper's use.
inline double log_abs_gamma(double x) { return std::lgamma(x); }

// 1/Gamma(x) with exact zero at the poles.
inline double rgamma(double x) {
  if (gamma_pole(x)) return 0.0;
  if (x >= 0.5) {
    if (x <= 170.0) return 1.0 / std::tgamma(x);
    const double lg = std::lgamma(x);
    return lg > 745.0 ? 0.0 : std::exp(-lg);
  }
  const double lg = std::lgamma(x);
  const double s = gamma_sign(x);
  if (-lg > 709.0) return s * std::numeric_limits<double>::infinity();
  return s * std::exp(-lg);
}

}  // namespace fracprop

#endif
