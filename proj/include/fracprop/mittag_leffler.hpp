#ifndef FRACPROP_MITTAG_LEFFLER_HPP
#define FRACPROP_MITTAG_LEFFLER_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include "detail/mpfr_series.hpp"
#include "errors.hpp"
#include "gammafn.hpp"

namespace fracprop {

struct MLParams {
  double alpha;
  double beta;
  std::complex<double> z;
};

struct MLConfig {
  double switch_radius = 0.0;  // <= 0: per-alpha default, see default_switch_radius
  double series_tol = 1e-14;
  int asymptotic_terms = 4;    // minimum expansion order taken by ml_eval
};

enum class MLBranch { series, asymptotic };

struct MLEvalInfo {
  std::complex<double> value;
  MLBranch branch;
  long terms;
  long precision_bits;  // 53 on the double path
};

namespace detail {

constexpr double kPi = std::numbers::pi;
constexpr double kLog2e = 1.4426950408889634;

struct MLGeometry {
  double abs_z, theta, kappa;
  double growth_nats;  // largest Re of the exponential branches, -inf if none
  double cancel_nats;  // log of the series condition number
};

inline MLGeometry geometry(double alpha, std::complex<double> z) {
  MLGeometry g{};
  g.abs_z = std::abs(z);
  g.theta = std::abs(std::arg(z));
  g.kappa = g.abs_z > 0.0 ? std::pow(g.abs_z, 1.0 / alpha) : 0.0;
  g.growth_nats = -std::numeric_limits<double>::infinity();
  if (g.abs_z > 0.0) {
    if (g.theta <= kPi * alpha * (1.0 + 1e-14))
      g.growth_nats = g.kappa * std::cos(g.theta / alpha);
    if (alpha > 1.0 && (2.0 * kPi - g.theta) <= kPi * alpha)
      g.growth_nats = std::max(g.growth_nats,
                               g.kappa * std::cos((2.0 * kPi - g.theta) / alpha));
  }
  g.cancel_nats = g.kappa - std::max(g.growth_nats, 0.0);
  return g;
}

// Series evaluation in plain doubles with compensated accumulation.
// Terms are generated in log form, so no intermediate over/underflow.
inline MLEvalInfo series_double(double alpha, double beta, std::complex<double> z,
                                double tol, const MLGeometry& g, SeriesKind kind) {
  const double logaz = std::log(g.abs_z);
  const double phi = std::arg(z);
  double sr = 0, cr = 0, si = 0, ci = 0;  // Kahan pairs
  auto add = [](double& s, double& c, double v) {
    const double y = v - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  };
  const double result_est_nats =
      std::max(g.growth_nats, -std::log1p(g.abs_z) - 3.0);
  double peak = -std::numeric_limits<double>::infinity();
  double prev = -std::numeric_limits<double>::infinity();
  const long kmax = 100000;
  long k = 0;
  bool done = false;
  for (; k <= kmax && !done; ++k) {
    const double x = alpha * k + beta;
    if (!gamma_pole(x)) {
      double lm = k * logaz - log_abs_gamma(x);
      double sgn = gamma_sign(x);
      if (kind == SeriesKind::dfun) {
        lm += std::log(alpha * (k + 1));
      }
      const double mag = sgn * std::exp(lm);
      const double ph = k * phi;
      add(sr, cr, mag * std::cos(ph));
      add(si, ci, mag * std::sin(ph));
      peak = std::max(peak, lm);
      if (k >= 2 && lm < prev) {
        const bool below_round = lm < peak - 52.0;
        const bool below_tol = lm < std::log(tol) + result_est_nats - 2.0;
        if (below_round || below_tol) done = true;
      }
      prev = lm;
    } else if (k >= 2 && g.abs_z < 1e-300) {
      done = true;  // z == 0 handled by caller; guard only
    }
  }
  if (!done)
    throw no_convergence(
        "Mittag-Leffler series needs more than 1e5 terms; |z| too large for "
        "the series branch");
  return {{sr, si}, MLBranch::series, k, 53};
}

inline MLEvalInfo series_auto(double alpha, double beta, std::complex<double> z,
                              double tol, SeriesKind kind, MLContext& ctx) {
  if (std::abs(z) == 0.0) {
    const double v = (kind == SeriesKind::dfun) ? alpha * rgamma(alpha + 2.0)
                                                : rgamma(beta);
    return {{v, 0.0}, MLBranch::series, 1, 53};
  }
  const MLGeometry g = geometry(alpha, z);
  if (g.growth_nats > 708.0)
    throw std::overflow_error("Mittag-Leffler value exceeds double range");
  const double cancel_bits = kLog2e * g.cancel_nats;
  if (cancel_bits <= 20.0 && g.kappa <= 680.0)
    return series_double(alpha, beta, z, tol, g, kind);

  const double prec_d = 96.0 + kLog2e * (g.cancel_nats + 2.0 * std::log1p(g.abs_z));
  // term count scales like kappa/alpha and Gamma evaluations like prec^2;
  // refuse arguments whose series cost is out of scale
  const double work = (g.kappa / alpha + 64.0) * std::pow(prec_d / 1000.0, 2.0);
  if (prec_d > 16384.0 || work > 6e4)
    throw unsupported_region(
        "series branch infeasible: cancellation of " +
        std::to_string(g.cancel_nats) + " nats at |z|=" + std::to_string(g.abs_z));
  const auto prec = static_cast<mpfr_prec_t>(prec_d);
  const double tb = (kind == SeriesKind::dfun) ? alpha + 2.0 : beta;
  GammaTable& table = ctx.table(alpha, tb, kind, prec);
  const double result_est_nats =
      std::max(g.growth_nats, -std::log1p(g.abs_z) - 3.0);
  auto r = series_mpfr(z, alpha, tb, kind, prec, 400000,
                       kLog2e * result_est_nats, table);
  return {r.value, MLBranch::series, r.terms, static_cast<long>(prec)};
}

inline double default_switch_radius_impl(double alpha) {
  if (!(alpha > 0.0)) throw std::domain_error("alpha must be > 0");
  if (alpha >= 1.0) return 1e300;  // axis arguments sit at/inside the growth sector
  double s = std::pow(30.0, alpha);
  if (alpha > 0.5) {
    const double c = -std::cos(kPi / (2.0 * alpha));
    s = std::max(s, std::pow(30.0 / c, alpha));
  }
  return 2.0 * s;
}

// True when the algebraic expansion is certifiably accurate at z:
// inside the sector of the expansion theorem, past the optimal-truncation
// knee, and with every exponential branch deeply recessive.
inline bool asymptotic_certifiable(double alpha, const MLGeometry& g) {
  if (!(alpha > 0.0 && alpha < 2.0)) return false;
  if (g.theta <= kPi * alpha / 2.0 + 1e-9) return false;
  if (g.kappa < 30.0) return false;
  if (std::isfinite(g.growth_nats) && g.growth_nats > -30.0) return false;
  return true;
}

struct AsymResult {
  std::complex<double> value;
  long terms;
};

// -sum_{k=1}^{p} z^{-k} / Gamma(beta - alpha k); adaptive == true stops at
// the smallest term (never before p_min), otherwise exactly p_min terms.
inline AsymResult asymptotic_sum(double alpha, double beta,
                                 std::complex<double> z, int p_min,
                                 bool adaptive, double tol) {
  const double logaz = std::log(std::abs(z));
  const double phi = std::arg(z);
  double sr = 0, si = 0;
  double prev = std::numeric_limits<double>::infinity();
  double acc_scale = 0.0;
  const int p_cap = adaptive ? 300 : p_min;
  int used = 0;
  for (int k = 1; k <= p_cap; ++k) {
    const double x = beta - alpha * k;
    double lm = -std::numeric_limits<double>::infinity();
    if (!gamma_pole(x)) {
      lm = -k * logaz - log_abs_gamma(x);
      if (adaptive && k > p_min && lm >= prev) break;  // divergent tail reached
      const double mag = gamma_sign(x) * std::exp(lm);
      const double ph = -k * phi;
      sr -= mag * std::cos(ph);
      si -= mag * std::sin(ph);
      acc_scale = std::max(acc_scale, std::hypot(sr, si));
      prev = lm;
    }
    used = k;
    if (adaptive && k >= p_min && std::isfinite(lm) &&
        lm < std::log(tol * (acc_scale + 1e-300)) - 2.0)
      break;
  }
  return {{sr, si}, used};
}

inline MLEvalInfo ml_eval_impl(const MLParams& p, const MLConfig& cfg,
                               MLContext& ctx) {
  if (!(p.alpha > 0.0)) throw std::domain_error("ml_eval: alpha must be > 0");
  if (!std::isfinite(p.z.real()) || !std::isfinite(p.z.imag()))
    throw std::domain_error("ml_eval: non-finite argument");
  const double r = cfg.switch_radius > 0.0 ? cfg.switch_radius
                                           : default_switch_radius_impl(p.alpha);
  const MLGeometry g = geometry(p.alpha, p.z);
  if (g.abs_z <= r)
    return series_auto(p.alpha, p.beta, p.z, cfg.series_tol, SeriesKind::plain,
                       ctx);
  if (asymptotic_certifiable(p.alpha, g)) {
    auto a = asymptotic_sum(p.alpha, p.beta, p.z,
                            std::max(1, cfg.asymptotic_terms), true,
                            cfg.series_tol);
    return {a.value, MLBranch::asymptotic, a.terms, 53};
  }
  try {
    return series_auto(p.alpha, p.beta, p.z, cfg.series_tol, SeriesKind::plain,
                       ctx);
  } catch (const unsupported_region&) {
    throw unsupported_region(
        "ml_eval: |z|=" + std::to_string(g.abs_z) + ", arg z=" +
        std::to_string(g.theta) +
        " lies outside the asymptotic sector and beyond series reach");
  }
}

}  // namespace detail

// Radius of the series<->asymptotic handoff used when MLConfig does not pin
// one. Chosen so that on the imaginary axis (the propagator arguments) the
// algebraic expansion is certifiable from half this radius upward.
inline double default_switch_radius(double alpha) {
  return detail::default_switch_radius_impl(alpha);
}

// Taylor series sum_{k>=0} z^k / Gamma(alpha k + beta), truncated once the
// tail is below tol. Escalates to extended precision when cancellation or
// magnitude demands it.
inline std::complex<double> ml_series(const MLParams& p, double tol) {
  if (!(p.alpha > 0.0)) throw std::domain_error("ml_series: alpha must be > 0");
  if (!(tol > 0.0)) throw std::domain_error("ml_series: tol must be > 0");
  detail::MLContext ctx;
  return detail::series_auto(p.alpha, p.beta, p.z, tol, detail::SeriesKind::plain,
                             ctx)
      .value;
}

// Algebraic expansion -sum_{k=1}^{p} z^{-k}/Gamma(beta - alpha k), valid for
// 0 < alpha < 2 on |arg z| in (pi alpha/2, pi]; remainder O(|z|^{-1-p}).
inline std::complex<double> ml_asymptotic(const MLParams& p, int ord) {
  if (!(p.alpha > 0.0 && p.alpha < 2.0))
    throw std::domain_error("ml_asymptotic: requires 0 < alpha < 2");
  if (ord < 1) throw std::domain_error("ml_asymptotic: p must be >= 1");
  const double az = std::abs(p.z);
  if (!(az >= 1.0))
    throw std::domain_error("ml_asymptotic: |z| below the expansion's range");
  const double theta = std::abs(std::arg(p.z));
  if (!(theta > detail::kPi * p.alpha / 2.0))
    throw unsupported_region(
        "ml_asymptotic: arg z outside the sector (needs |arg z| > pi*alpha/2)");
  return detail::asymptotic_sum(p.alpha, p.beta, p.z, ord, false, 0.0).value;
}

// Expansion order ml_eval would use at this argument (smallest-term rule,
// floored at p_min).
inline int ml_asymptotic_order(const MLParams& p, int p_min = 1) {
  auto a = detail::asymptotic_sum(p.alpha, p.beta, p.z, std::max(1, p_min),
                                  true, 1e-16);
  return static_cast<int>(a.terms);
}

inline MLEvalInfo ml_eval_info(const MLParams& p, const MLConfig& cfg = {}) {
  detail::MLContext ctx;
  ctx.alpha = p.alpha;
  return detail::ml_eval_impl(p, cfg, ctx);
}

inline MLEvalInfo ml_eval_info(const MLParams& p, const MLConfig& cfg,
                               detail::MLContext& ctx) {
  return detail::ml_eval_impl(p, cfg, ctx);
}

inline std::complex<double> ml_eval(const MLParams& p, const MLConfig& cfg = {}) {
  return ml_eval_info(p, cfg).value;
}

inline std::complex<double> ml_eval(const MLParams& p, const MLConfig& cfg,
                                    detail::MLContext& ctx) {
  return detail::ml_eval_impl(p, cfg, ctx).value;
}

// d/dt E_{a,1}(l t^a) and d/dt [t^{a-1} E_{a,a}(l t^a)] via the closed
// derivative identities (no differencing).
inline std::pair<std::complex<double>, std::complex<double>> ml_derivative_pair(
    double alpha, std::complex<double> lambda, double t,
    const MLConfig& cfg = {}) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::domain_error("ml_derivative_pair: requires 0 < alpha <= 1");
  if (!(t > 0.0))
    throw std::domain_error("ml_derivative_pair: t must be positive");
  const std::complex<double> w = lambda * std::pow(t, alpha);
  const auto d1 =
      lambda * std::pow(t, alpha - 1.0) * ml_eval({alpha, alpha, w}, cfg);
  const auto d2 =
      std::pow(t, alpha - 2.0) * ml_eval({alpha, alpha - 1.0, w}, cfg);
  return {d1, d2};
}

namespace detail {

// (E_{a,1}(z) - E_{a,2}(z)) / z, the second product-integration moment of the
// Duhamel kernel; evaluated by its own series to avoid cancellation at small z.
inline std::complex<double> ml_dfun(double alpha, std::complex<double> z,
                                    const MLConfig& cfg, MLContext& ctx) {
  const double r = cfg.switch_radius > 0.0 ? cfg.switch_radius
                                           : default_switch_radius_impl(alpha);
  const MLGeometry g = geometry(alpha, z);
  if (g.abs_z <= r)
    return series_auto(alpha, alpha + 2.0, z, cfg.series_tol, SeriesKind::dfun,
                       ctx)
        .value;
  if (asymptotic_certifiable(alpha, g)) {
    const int pm = std::max(1, cfg.asymptotic_terms);
    const auto e1 = asymptotic_sum(alpha, 1.0, z, pm, true, cfg.series_tol);
    const auto e2 = asymptotic_sum(alpha, 2.0, z, pm, true, cfg.series_tol);
    return (e1.value - e2.value) / z;
  }
  return series_auto(alpha, alpha + 2.0, z, cfg.series_tol, SeriesKind::dfun,
                     ctx)
      .value;
}

}  // namespace detail

}  // namespace fracprop

#endif
