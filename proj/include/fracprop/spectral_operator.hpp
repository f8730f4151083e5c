#ifndef FRACPROP_SPECTRAL_OPERATOR_HPP
#define FRACPROP_SPECTRAL_OPERATOR_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "detail/fft.hpp"
#include "mittag_leffler.hpp"

namespace fracprop {

enum class SymbolPreset {
  schrodinger,          // xi^2
  fractional_laplacian, // |xi|^{2 beta}
  airy,                 // xi^3 (the real symbol of i d^3/dx^3 in canonical form)
  benjamin_ono,         // xi |xi|
  custom
};

// Real dispersive symbol P(xi) with growth |xi|^m at infinity.
struct SymbolSpec {
  SymbolPreset preset = SymbolPreset::schrodinger;
  double beta = 1.0;  // fractional_laplacian exponent
  std::function<double(double)> custom;
  double growth_exponent = 2.0;  // m
  int dimension = 1;             // n

  double operator()(double xi) const {
    switch (preset) {
      case SymbolPreset::schrodinger: return xi * xi;
      case SymbolPreset::fractional_laplacian:
        return std::pow(std::abs(xi), 2.0 * beta);
      case SymbolPreset::airy: return xi * xi * xi;
      case SymbolPreset::benjamin_ono: return xi * std::abs(xi);
      case SymbolPreset::custom: return custom(xi);
    }
    return 0.0;
  }

  static SymbolSpec make(SymbolPreset p, double beta = 1.0) {
    SymbolSpec s;
    s.preset = p;
    s.beta = beta;
    switch (p) {
      case SymbolPreset::schrodinger: s.growth_exponent = 2.0; break;
      case SymbolPreset::fractional_laplacian: s.growth_exponent = 2.0 * beta; break;
      case SymbolPreset::airy: s.growth_exponent = 3.0; break;
      case SymbolPreset::benjamin_ono: s.growth_exponent = 2.0; break;
      case SymbolPreset::custom: break;
    }
    return s;
  }
};

// Coefficient vector of a state in the diagonalizing basis.
struct StateField {
  std::vector<std::complex<double>> coef;

  static StateField zeros(size_t n) {
    StateField f;
    f.coef.assign(n, 0.0);
    return f;
  }
  size_t size() const { return coef.size(); }
};

inline double h_norm(const StateField& f) {
  double s = 0.0;
  for (const auto& c : f.coef) s += std::norm(c);
  return std::sqrt(s);
}

// Finite unitary-diagonal realization of the selfadjoint operator A:
// FFT-implicit on the torus, or an explicit eigenbasis from a dense
// Hermitian diagonalization.
class DiagonalizedOperator {
 public:
  enum class Map { fft_implicit, dense };

  Map map_kind = Map::fft_implicit;
  int modes = 0;
  double length = 2.0 * std::numbers::pi;
  std::vector<double> eigenvalues;  // FFT: bin order; dense: ascending
  Eigen::MatrixXcd unitary;         // dense only; columns are eigenvectors
  bool injective = false;
  double unitary_residual = 0.0;    // dense only: ||U*U - I||_max

  // torus frequency of FFT bin j
  double frequency(size_t j) const {
    const auto n = static_cast<long>(modes);
    const long k = static_cast<long>(j) < n / 2 ? static_cast<long>(j)
                                                : static_cast<long>(j) - n;
    return 2.0 * std::numbers::pi * static_cast<double>(k) / length;
  }

  std::vector<std::complex<double>> to_physical(const StateField& f) const {
    check_size(f);
    if (map_kind == Map::fft_implicit) {
      auto v = f.coef;
      detail::fft_unitary(v, /*inverse=*/true);
      return v;
    }
    Eigen::Map<const Eigen::VectorXcd> c(f.coef.data(),
                                         static_cast<long>(f.coef.size()));
    Eigen::VectorXcd p = unitary * c;
    return {p.data(), p.data() + p.size()};
  }

  StateField to_spectral(std::span<const std::complex<double>> phys) const {
    if (static_cast<int>(phys.size()) != modes)
      throw std::domain_error("to_spectral: wrong field length");
    StateField f;
    if (map_kind == Map::fft_implicit) {
      f.coef.assign(phys.begin(), phys.end());
      detail::fft_unitary(f.coef, /*inverse=*/false);
      return f;
    }
    Eigen::Map<const Eigen::VectorXcd> p(phys.data(),
                                         static_cast<long>(phys.size()));
    Eigen::VectorXcd c = unitary.adjoint() * p;
    f.coef.assign(c.data(), c.data() + c.size());
    return f;
  }

  DiagonalizedOperator scaled(double factor) const {
    DiagonalizedOperator o = *this;
    for (auto& a : o.eigenvalues) a *= factor;
    o.recompute_injectivity();
    return o;
  }

  void recompute_injectivity() {
    injective = !eigenvalues.empty();
    for (double a : eigenvalues)
      if (std::abs(a) <= 1e-12) injective = false;
  }

  void check_size(const StateField& f) const {
    if (static_cast<int>(f.coef.size()) != modes)
      throw std::domain_error("StateField length does not match the operator");
  }
};

inline double graph_norm(const DiagonalizedOperator& op, const StateField& f) {
  op.check_size(f);
  double s = 0.0, sa = 0.0;
  for (size_t k = 0; k < f.coef.size(); ++k) {
    s += std::norm(f.coef[k]);
    sa += std::norm(f.coef[k]) * op.eigenvalues[k] * op.eigenvalues[k];
  }
  return std::sqrt(s) + std::sqrt(sa);
}

// Pure Fourier-multiplier operator on the periodic torus of length L.
inline DiagonalizedOperator build_diagonal(const SymbolSpec& symbol, int n_modes,
                                           double L) {
  if (n_modes < 2 || (n_modes & (n_modes - 1)) != 0)
    throw std::domain_error("build_diagonal: N must be a power of two");
  if (!(L > 0.0)) throw std::domain_error("build_diagonal: L must be positive");
  if (symbol.dimension != 1)
    throw std::domain_error("build_diagonal: torus operators are 1-d here");
  DiagonalizedOperator op;
  op.map_kind = DiagonalizedOperator::Map::fft_implicit;
  op.modes = n_modes;
  op.length = L;
  op.eigenvalues.resize(static_cast<size_t>(n_modes));
  for (size_t j = 0; j < op.eigenvalues.size(); ++j)
    op.eigenvalues[j] = symbol(op.frequency(j));
  op.recompute_injectivity();
  return op;
}

// Dense Hermitian path: validates the Hermitian residue, diagonalizes,
// returns the explicit eigenbasis with ascending eigenvalues.
inline DiagonalizedOperator build_from_matrix(const Eigen::MatrixXcd& m,
                                              double L) {
  if (m.rows() != m.cols() || m.rows() < 1)
    throw std::domain_error("build_from_matrix: need a square matrix");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double residue = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (residue > 1e-10 * scale)
    throw std::domain_error(
        "build_from_matrix: non-Hermitian residue " + std::to_string(residue) +
        " (complex-valued potentials are not admissible)");
  const Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("build_from_matrix: eigendecomposition failed");

  DiagonalizedOperator op;
  op.map_kind = DiagonalizedOperator::Map::dense;
  op.modes = static_cast<int>(m.rows());
  op.length = L;
  op.unitary = es.eigenvectors();
  op.eigenvalues.assign(es.eigenvalues().data(),
                        es.eigenvalues().data() + es.eigenvalues().size());
  op.unitary_residual =
      (op.unitary.adjoint() * op.unitary -
       Eigen::MatrixXcd::Identity(op.modes, op.modes))
          .cwiseAbs()
          .maxCoeff();
  op.recompute_injectivity();
  return op;
}

// H + multiplication by q + V on the collocation grid x_i = i L/N.
inline DiagonalizedOperator build_perturbed(const SymbolSpec& symbol,
                                            std::span<const double> q,
                                            std::span<const double> V,
                                            int n_modes, double L) {
  if (n_modes > 4096)
    throw std::domain_error("build_perturbed: dense path capped at N = 4096");
  DiagonalizedOperator diag = build_diagonal(symbol, n_modes, L);
  if (!q.empty() && static_cast<int>(q.size()) != n_modes)
    throw std::domain_error("build_perturbed: q has wrong length");
  if (!V.empty() && static_cast<int>(V.size()) != n_modes)
    throw std::domain_error("build_perturbed: V has wrong length");

  const auto n = static_cast<size_t>(n_modes);
  Eigen::MatrixXcd a(n_modes, n_modes);
  std::vector<std::complex<double>> col(n);
  for (size_t j = 0; j < n; ++j) {
    std::fill(col.begin(), col.end(), std::complex<double>(0.0));
    col[j] = 1.0;
    detail::fft_unitary(col, /*inverse=*/false);
    for (size_t k = 0; k < n; ++k) col[k] *= diag.eigenvalues[k];
    detail::fft_unitary(col, /*inverse=*/true);
    for (size_t i = 0; i < n; ++i) a(static_cast<long>(i), static_cast<long>(j)) = col[i];
  }
  for (size_t i = 0; i < n; ++i) {
    double d = 0.0;
    if (!q.empty()) d += q[i];
    if (!V.empty()) d += V[i];
    a(static_cast<long>(i), static_cast<long>(i)) += d;
  }
  return build_from_matrix(a, L);
}

inline StateField apply_A(const DiagonalizedOperator& op, const StateField& f) {
  op.check_size(f);
  StateField g = f;
  for (size_t k = 0; k < g.coef.size(); ++k) g.coef[k] *= op.eigenvalues[k];
  return g;
}

// S_t: coefficient-wise multiplication by E_{alpha,1}(i a_k t^alpha).
inline StateField propagator_S(const DiagonalizedOperator& op, double alpha,
                               double t, const StateField& f,
                               const MLConfig& cfg = {}) {
  op.check_size(f);
  if (!(t >= 0.0)) throw std::domain_error("propagator_S: t must be >= 0");
  if (t == 0.0) return f;
  StateField g = f;
  const double ta = std::pow(t, alpha);
  detail::MLContext ctx;
  ctx.alpha = alpha;
  std::vector<std::pair<double, std::complex<double>>> memo;
  for (size_t k = 0; k < g.coef.size(); ++k) {
    const double a = op.eigenvalues[k];
    std::complex<double> mult;
    bool found = false;
    for (const auto& [key, val] : memo)
      if (key == a) { mult = val; found = true; break; }
    if (!found) {
      try {
        mult = ml_eval({alpha, 1.0, {0.0, a * ta}}, cfg, ctx);
      } catch (const unsupported_region& e) {
        throw unsupported_region("propagator_S: mode " + std::to_string(k) +
                                 ": " + e.what());
      }
      memo.emplace_back(a, mult);
    }
    g.coef[k] *= mult;
  }
  return g;
}

// P_t: coefficient-wise multiplication by t^{alpha-1} E_{alpha,alpha}(i a_k t^alpha).
inline StateField propagator_P(const DiagonalizedOperator& op, double alpha,
                               double t, const StateField& f,
                               const MLConfig& cfg = {}) {
  op.check_size(f);
  if (!(t > 0.0)) throw std::domain_error("propagator_P: t must be positive");
  StateField g = f;
  const double ta = std::pow(t, alpha);
  const double front = std::pow(t, alpha - 1.0);
  detail::MLContext ctx;
  ctx.alpha = alpha;
  std::vector<std::pair<double, std::complex<double>>> memo;
  for (size_t k = 0; k < g.coef.size(); ++k) {
    const double a = op.eigenvalues[k];
    std::complex<double> mult;
    bool found = false;
    for (const auto& [key, val] : memo)
      if (key == a) { mult = val; found = true; break; }
    if (!found) {
      try {
        mult = front * ml_eval({alpha, alpha, {0.0, a * ta}}, cfg, ctx);
      } catch (const unsupported_region& e) {
        throw unsupported_region("propagator_P: mode " + std::to_string(k) +
                                 ": " + e.what());
      }
      memo.emplace_back(a, mult);
    }
    g.coef[k] *= mult;
  }
  return g;
}

struct RelativeBoundRow {
  double gamma;
  double integral;   // continuum Riemann-sum of 1/(P^2 + gamma^2)
  double c1, c2;     // ||(q+V)u|| <= c1 ||u|| + c2 ||H u||
  double sharpness;  // max over the batch of ||(q+V)u|| / (c1||u|| + c2||Hu||)
};

struct RelativeBoundTable {
  std::vector<RelativeBoundRow> rows;
  double integral_slope = 0.0;      // d log(integral) / d log(gamma)
  double gamma_below_one = 0.0;     // smallest gamma with c2 < 1 (0 if none)
  double max_violation = 0.0;       // max over batch/gammas of the bound ratio
};

// Desk-scale probe of the relative-bound mechanism: the resolvent-type
// integral, its gamma-scaling, and the fitted (c1, c2) pair validated
// against a batch of random fields.
inline RelativeBoundTable relative_bound_probe(
    const SymbolSpec& symbol, std::span<const double> q,
    std::span<const double> V, std::span<const double> gammas, int n_modes,
    double L, unsigned long long seed = 2024) {
  const double m = symbol.growth_exponent;
  const int n_dim = symbol.dimension;
  if (!(m > 0.5 * n_dim))
    throw std::domain_error(
        "relative_bound_probe: requires m > n/2 (standing hypothesis)");
  if (gammas.empty())
    throw std::domain_error("relative_bound_probe: empty gamma list");
  for (size_t i = 1; i < gammas.size(); ++i)
    if (!(gammas[i] > gammas[i - 1] && gammas[0] > 0.0))
      throw std::domain_error(
          "relative_bound_probe: gammas must be positive increasing");

  const auto op = build_diagonal(symbol, n_modes, L);
  const auto n = static_cast<size_t>(n_modes);
  const double dx = L / n_modes;

  double qn2 = 0.0, vinf = 0.0;
  for (size_t i = 0; i < q.size(); ++i) qn2 += q[i] * q[i] * dx;
  qn2 = std::sqrt(qn2);
  for (size_t i = 0; i < V.size(); ++i) vinf = std::max(vinf, std::abs(V[i]));

  // random batch in D(H)
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int batch = 24;
  std::vector<StateField> fields;
  for (int b = 0; b < batch; ++b) {
    StateField f = StateField::zeros(n);
    for (size_t k = 0; k < n; ++k) {
      const double decay = 1.0 / (1.0 + std::abs(op.eigenvalues[k]));
      f.coef[k] = std::complex<double>(gauss(rng), gauss(rng)) * decay;
    }
    fields.push_back(std::move(f));
  }

  // continuum integral on a fine frequency grid, wide enough for the largest
  // gamma: int d^n xi / (P(|xi|)^2 + gamma^2)
  const double gmax = gammas.back(), gmin = gammas.front();
  const double xi_max = std::max(64.0, 8.0 * std::pow(gmax, 1.0 / m));
  const double h_xi = std::min(0.05, std::pow(gmin, 1.0 / m) / 64.0);
  auto continuum_integral = [&](double gamma) {
    double s = 0.0;
    if (n_dim == 1) {
      for (double xi = -xi_max; xi <= xi_max; xi += h_xi) {
        const double p = symbol(xi);
        s += h_xi / (p * p + gamma * gamma);
      }
    } else {
      for (double r = 0.5 * h_xi; r <= xi_max; r += h_xi) {
        const double p = symbol(r);
        s += 2.0 * std::numbers::pi * r * h_xi / (p * p + gamma * gamma);
      }
    }
    return s;
  };

  RelativeBoundTable table;
  for (double gamma : gammas) {
    RelativeBoundRow row;
    row.gamma = gamma;
    row.integral = continuum_integral(gamma);
    // discrete Cauchy-Schwarz constant on the operator's own mode set
    double sd = 0.0;
    for (double a : op.eigenvalues) sd += 1.0 / (a * a + gamma * gamma);
    const double cs = std::sqrt(sd / L);
    row.c2 = qn2 * cs;
    row.c1 = vinf + qn2 * cs * gamma;
    row.sharpness = 0.0;
    for (const auto& f : fields) {
      const auto phys = op.to_physical(f);
      double tu = 0.0, nu = 0.0, nhu = 0.0;
      for (size_t i = 0; i < n; ++i) {
        double pert = 0.0;
        if (!q.empty()) pert += q[i];
        if (!V.empty()) pert += V[i];
        tu += std::norm(pert * phys[i]) * dx;
        nu += std::norm(phys[i]) * dx;
      }
      for (size_t k = 0; k < n; ++k)
        nhu += std::norm(f.coef[k]) * op.eigenvalues[k] * op.eigenvalues[k] * dx;
      const double lhs = std::sqrt(tu);
      const double rhs = row.c1 * std::sqrt(nu) + row.c2 * std::sqrt(nhu);
      if (rhs > 0.0)
        row.sharpness = std::max(row.sharpness, lhs / rhs);
      else if (lhs > 0.0)
        row.sharpness = std::numeric_limits<double>::infinity();
    }
    table.max_violation = std::max(table.max_violation, row.sharpness);
    table.rows.push_back(row);
  }

  // least-squares slope of log(integral) against log(gamma)
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const auto cnt = static_cast<double>(table.rows.size());
  for (const auto& r : table.rows) {
    const double x = std::log(r.gamma), y = std::log(r.integral);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  if (table.rows.size() > 1)
    table.integral_slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  for (const auto& r : table.rows)
    if (r.c2 < 1.0) { table.gamma_below_one = r.gamma; break; }
  return table;
}

}  // namespace fracprop

#endif
