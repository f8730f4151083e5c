#ifndef FRACPROP_TIME_GRID_HPP
#define FRACPROP_TIME_GRID_HPP

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace fracprop {

// Strictly increasing time nodes t_0 = 0 < ... < t_N = T. Graded meshes
// cluster nodes at t = 0 as t_j = T (j/N)^r to resolve the t^alpha layer.
struct TimeGrid {
  std::vector<double> nodes;
  double grading = 1.0;

  static TimeGrid graded(double T, int intervals, double r) {
    if (!(T > 0.0) || intervals < 1 || !(r >= 1.0))
      throw std::domain_error("TimeGrid::graded: need T>0, N>=1, r>=1");
    TimeGrid g;
    g.grading = r;
    g.nodes.resize(static_cast<size_t>(intervals) + 1);
    for (int j = 0; j <= intervals; ++j)
      g.nodes[static_cast<size_t>(j)] =
          T * std::pow(static_cast<double>(j) / intervals, r);
    g.nodes.back() = T;
    return g;
  }

  static TimeGrid uniform(double T, int intervals) {
    return graded(T, intervals, 1.0);
  }

  static TimeGrid from_nodes(std::vector<double> nodes) {
    if (nodes.size() < 2 || nodes.front() != 0.0)
      throw std::domain_error("TimeGrid: need t_0 = 0 and at least two nodes");
    for (size_t i = 1; i < nodes.size(); ++i)
      if (!(nodes[i] > nodes[i - 1]))
        throw std::domain_error("TimeGrid: nodes must increase strictly");
    TimeGrid g;
    g.nodes = std::move(nodes);
    g.grading = 0.0;  // unspecified
    return g;
  }

  size_t intervals() const { return nodes.size() - 1; }
  double horizon() const { return nodes.back(); }
};

// Product-integration weights for the singular kernel (t_n - tau)^{alpha-1}
// against piecewise-linear data: row n holds node weights w_0..w_n with
// sum_j w_j = t_n^alpha / alpha (the kernel integrates constants exactly).
class KernelWeights {
 public:
  KernelWeights(const TimeGrid& grid, double alpha)
      : grid_(grid), alpha_(alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0))
      throw std::domain_error("KernelWeights: alpha must lie in (0,1]");
    const auto& t = grid.nodes;
    const size_t n_nodes = t.size();
    offsets_.resize(n_nodes + 1, 0);
    for (size_t n = 0; n < n_nodes; ++n) offsets_[n + 1] = offsets_[n] + n + 1;
    w_.assign(offsets_.back(), 0.0);
    // two-point Gauss abscissae on [0,1]
    const double g1 = 0.5 - 0.5 / std::sqrt(3.0);
    const double g2 = 0.5 + 0.5 / std::sqrt(3.0);
    for (size_t n = 1; n < n_nodes; ++n) {
      double* row = w_.data() + offsets_[n];
      for (size_t j = 0; j < n; ++j) {
        const double h = t[j + 1] - t[j];
        const double da = t[n] - t[j];
        const double db = t[n] - t[j + 1];
        if (h > 1e-3 * da) {
          // antiderivative differences, kept relative-accurate via expm1
          const double m0 =
              -std::pow(da, alpha) * std::expm1(alpha * std::log1p(-h / da)) /
              alpha;
          const double m1 = -std::pow(da, alpha + 1.0) *
                            std::expm1((alpha + 1.0) * std::log1p(-h / da)) /
                            (alpha + 1.0);
          row[j] += (m1 - db * m0) / h;
          row[j + 1] += (da * m0 - m1) / h;
        } else {
          // sliver cell relative to its distance from the singularity:
          // differencing loses everything, a 2-point Gauss rule is exact
          // to the cubic term of the locally smooth kernel
          const double d1 = da - g1 * h, d2 = da - g2 * h;
          const double k1 = std::pow(d1, alpha - 1.0);
          const double k2 = std::pow(d2, alpha - 1.0);
          row[j] += 0.5 * h * (k1 * (1.0 - g1) + k2 * (1.0 - g2));
          row[j + 1] += 0.5 * h * (k1 * g1 + k2 * g2);
        }
      }
    }
  }

  std::span<const double> row(size_t n) const {
    return {w_.data() + offsets_[n], n + 1};
  }
  double alpha() const { return alpha_; }
  const TimeGrid& grid() const { return grid_; }

 private:
  TimeGrid grid_;
  double alpha_;
  std::vector<size_t> offsets_;
  std::vector<double> w_;
};

}  // namespace fracprop

#endif
