#ifndef FRACPROP_FRAC_CALCULUS_HPP
#define FRACPROP_FRAC_CALCULUS_HPP

#include <cmath>
#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "gammafn.hpp"
#include "mittag_leffler.hpp"
#include "time_grid.hpp"

namespace fracprop {

// g_alpha(t) = t^{alpha-1}/Gamma(alpha) for t > 0, zero otherwise.
inline double g_kernel(double alpha, double t) {
  if (!(alpha > 0.0)) throw std::domain_error("g_kernel: alpha must be > 0");
  if (t <= 0.0) return 0.0;
  return std::pow(t, alpha - 1.0) * rgamma(alpha);
}

// Riemann-Liouville integral (g_alpha * u)(t_n) at every grid node, exact for
// piecewise-linear u. Entry 0 corresponds to t_0 = 0 and is zero.
inline std::vector<std::complex<double>> rl_integral(
    double alpha, const TimeGrid& grid,
    std::span<const std::complex<double>> u) {
  if (grid.nodes.size() < 2)
    throw std::domain_error("rl_integral: grid needs at least 2 nodes");
  if (u.size() != grid.nodes.size())
    throw std::domain_error("rl_integral: samples must cover every node");
  const KernelWeights kw(grid, alpha);
  const double rg = rgamma(alpha);
  std::vector<std::complex<double>> out(u.size(), 0.0);
  for (size_t n = 1; n < u.size(); ++n) {
    auto w = kw.row(n);
    std::complex<double> acc = 0.0;
    for (size_t j = 0; j <= n; ++j) acc += w[j] * u[j];
    out[n] = acc * rg;
  }
  return out;
}

inline std::vector<std::complex<double>> rl_integral(
    double alpha, const TimeGrid& grid, std::span<const double> u) {
  std::vector<std::complex<double>> uc(u.begin(), u.end());
  return rl_integral(alpha, grid, std::span<const std::complex<double>>(uc));
}

// Caputo derivative D_t^alpha u at nodes t_1..t_N (not defined at t_0): the
// L1 form, i.e. the exact derivative of the product integration of
// g_{1-alpha}*(u - u(0)) for piecewise-linear u.
inline std::vector<std::complex<double>> caputo_derivative(
    double alpha, const TimeGrid& grid,
    std::span<const std::complex<double>> u) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("caputo_derivative: alpha must lie in (0,1)");
  if (grid.nodes.size() < 3)
    throw std::domain_error("caputo_derivative: grid needs at least 3 nodes");
  if (u.size() != grid.nodes.size())
    throw std::domain_error("caputo_derivative: samples must cover every node");
  const auto& t = grid.nodes;
  const double rg2 = rgamma(2.0 - alpha);
  std::vector<std::complex<double>> out(u.size() - 1, 0.0);
  for (size_t n = 1; n < u.size(); ++n) {
    std::complex<double> acc = 0.0;
    for (size_t j = 0; j < n; ++j) {
      const double h = t[j + 1] - t[j];
      const double da = t[n] - t[j];
      const double m = -std::pow(da, 1.0 - alpha) *
                       std::expm1((1.0 - alpha) * std::log1p(-h / da));
      acc += (u[j + 1] - u[j]) / h * m;
    }
    out[n - 1] = acc * rg2;
  }
  return out;
}

// Fractional Gronwall envelope: a(t) E_{alpha,1}(b Gamma(alpha) t^alpha).
inline double gronwall_bound(const std::function<double(double)>& a, double b,
                             double alpha, double t, const MLConfig& cfg = {}) {
  if (!(b > 0.0)) throw std::domain_error("gronwall_bound: b must be > 0");
  if (!(alpha > 0.0)) throw std::domain_error("gronwall_bound: alpha must be > 0");
  if (!(t >= 0.0)) throw std::domain_error("gronwall_bound: t must be >= 0");
  const double arg = b * std::tgamma(alpha) * std::pow(t, alpha);
  return a(t) * ml_eval({alpha, 1.0, {arg, 0.0}}, cfg).real();
}

// Continuous, nondecreasing, nonnegative growth function with w(0) = 0.
struct GrowthFunction {
  std::function<double(double)> w;
  bool declared_monotone = true;
};

struct AdmissibilityResult {
  bool divergent = false;
  double value = 0.0;        // extrapolated integral when finite
  double growth_ratio = 0.0; // I(4 s_max) / I(s_max)
};

namespace detail {

// integral of f over [lo, hi] after the substitution sigma = e^y,
// composite Simpson refined until stable
inline double log_simpson(const std::function<double(double)>& f, double lo,
                          double hi) {
  const double ylo = std::log(lo), yhi = std::log(hi);
  auto g = [&](double y) {
    const double s = std::exp(y);
    return f(s) * s;
  };
  double prev = 0.0;
  for (long n = 256; n <= (1L << 20); n *= 2) {
    const double h = (yhi - ylo) / static_cast<double>(n);
    double acc = g(ylo) + g(yhi);
    for (long i = 1; i < n; ++i)
      acc += g(ylo + h * static_cast<double>(i)) * ((i % 2) ? 4.0 : 2.0);
    acc *= h / 3.0;
    if (n > 256 && std::abs(acc - prev) <= 1e-9 * (1.0 + std::abs(acc)))
      return acc;
    prev = acc;
  }
  return prev;
}

}  // namespace detail

// Numerically classifies the admissibility integral
// int_1^inf sigma^{1/alpha+eps-1} / w(sigma)^{1/alpha+eps} dsigma:
// divergent (global-existence regime) vs finite.
inline AdmissibilityResult admissibility(const GrowthFunction& wf, double alpha,
                                         double eps, double sigma_max) {
  if (!(alpha > 0.0)) throw std::domain_error("admissibility: alpha must be > 0");
  if (!(eps > 0.0)) throw std::domain_error("admissibility: eps must be > 0");
  if (!(sigma_max >= 10.0))
    throw std::domain_error("admissibility: sigma_max must be >= 10");
  if (std::abs(wf.w(0.0)) > 1e-12)
    throw std::domain_error("admissibility: w(0) must vanish");
  // sampled validity: positive and nondecreasing on [1, 16 sigma_max]
  double prev = -1.0;
  for (int i = 0; i <= 64; ++i) {
    const double s =
        std::exp(std::log(16.0 * sigma_max) * static_cast<double>(i) / 64.0);
    const double v = wf.w(s);
    if (!(v > 0.0))
      throw std::domain_error("admissibility: w must be positive for sigma >= 1");
    if (v < prev * (1.0 - 1e-12))
      throw std::domain_error("admissibility: w must be nondecreasing");
    prev = v;
  }
  const double q = 1.0 / alpha + eps;
  auto f = [&](double s) { return std::pow(s, q - 1.0) / std::pow(wf.w(s), q); };
  const double i1 = detail::log_simpson(f, 1.0, sigma_max);
  const double i4 = i1 + detail::log_simpson(f, sigma_max, 4.0 * sigma_max);
  const double i16 = i4 + detail::log_simpson(f, 4.0 * sigma_max, 16.0 * sigma_max);

  AdmissibilityResult res;
  res.growth_ratio = i4 / i1;
  res.divergent = res.growth_ratio >= 1.02;
  if (res.divergent) {
    res.value = std::numeric_limits<double>::infinity();
    return res;
  }
  const double d1 = i4 - i1, d2 = i16 - i4;
  res.value = i16;
  if (d1 > d2 && d2 > 0.0) res.value = i16 + d2 * d2 / (d1 - d2);  // geometric tail
  return res;
}

}  // namespace fracprop

#endif
