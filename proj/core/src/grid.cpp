#include "quench/grid.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "quench/domain.hpp"
#include "quench/error.hpp"

namespace quench {

RadialGrid::RadialGrid(int n, double R, std::size_t M) : n_(n), R_(R), M_(M), h_(0.0) {
  if (M < kMinGridNodes) throw InvalidArgument(fmt::format("grid too coarse: M = {} < {}", M, kMinGridNodes));
  if (!(std::isfinite(R) && R > 0.0)) throw InvalidArgument(fmt::format("radius R must be > 0, got {}", R));
  if (n < 1) throw InvalidArgument(fmt::format("dimension n must be >= 1, got {}", n));
  h_ = R / static_cast<double>(M - 1);
}

std::vector<double> RadialGrid::nodes() const {
  std::vector<double> r(M_);
  for (std::size_t i = 0; i < M_; ++i) r[i] = node(i);
  return r;
}

RadialField::RadialField(const RadialGrid& grid) : grid_(grid), values_(grid.size(), 0.0) {}

RadialField::RadialField(const RadialGrid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw InvalidArgument(fmt::format("field has {} values for a grid of {} nodes", values_.size(), grid_.size()));
  }
}

std::size_t RadialField::argmax() const {
  return static_cast<std::size_t>(std::distance(values_.begin(), std::max_element(values_.begin(), values_.end())));
}

double RadialField::max() const { return values_[argmax()]; }

LaplacianStencil radial_laplacian_stencil(const RadialGrid& grid) {
  const std::size_t M = grid.size();
  const double h2 = grid.spacing() * grid.spacing();
  const double dn = static_cast<double>(grid.dimension());
  LaplacianStencil s{std::vector<double>(M, 0.0), std::vector<double>(M, 0.0), std::vector<double>(M, 0.0)};

  s.diag[0] = -2.0 * dn / h2;
  s.upper[0] = 2.0 * dn / h2;
  for (std::size_t i = 1; i + 1 < M; ++i) {
    // (n-1)/r_i · 1/(2h) with r_i = i h.
    const double drift = (dn - 1.0) / (2.0 * static_cast<double>(i) * h2);
    s.lower[i] = 1.0 / h2 - drift;
    s.diag[i] = -2.0 / h2;
    s.upper[i] = 1.0 / h2 + drift;
  }
  return s;
}

RadialField radial_laplacian_apply(const RadialField& f) {
  const RadialGrid& g = f.grid();
  const std::size_t M = g.size();
  const LaplacianStencil s = radial_laplacian_stencil(g);
  RadialField out(g);

  // Written on differences so that constants map to exactly zero.
  out[0] = s.upper[0] * (f[1] - f[0]);
  for (std::size_t i = 1; i + 1 < M; ++i) {
    out[i] = s.lower[i] * (f[i - 1] - f[i]) + s.upper[i] * (f[i + 1] - f[i]);
  }
  // One-sided closure at r = R (exact on cubics for f'', quadratics for f').
  const double h = g.spacing();
  const double d2 = f[M - 1] - f[M - 2], d1 = f[M - 2] - f[M - 3], d0 = f[M - 3] - f[M - 4];
  const double second = (2.0 * d2 - 3.0 * d1 + d0) / (h * h);
  out[M - 1] = second + (static_cast<double>(g.dimension()) - 1.0) / g.radius() * boundary_derivative(f);
  return out;
}

double ball_integral(const RadialField& g) {
  const RadialGrid& grid = g.grid();
  const std::size_t M = grid.size();
  const int power = grid.dimension() - 1;
  double sum = 0.0;
  for (std::size_t i = 0; i < M; ++i) {
    const double weight = (i == 0 || i + 1 == M) ? 0.5 : 1.0;
    sum += weight * g[i] * std::pow(grid.node(i), power);
  }
  return unit_sphere_area(grid.dimension()) * grid.spacing() * sum;
}

double boundary_derivative(const RadialField& f) {
  const std::size_t M = f.size();
  return (3.0 * (f[M - 1] - f[M - 2]) - (f[M - 2] - f[M - 3])) / (2.0 * f.grid().spacing());
}

RadialField radial_derivative(const RadialField& f) {
  const std::size_t M = f.size();
  const double h = f.grid().spacing();
  RadialField d(f.grid());
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  for (std::size_t i = 1; i + 1 < M; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
  d[M - 1] = boundary_derivative(f);
  return d;
}

double max_abs_second_difference(const RadialField& f) {
  const double h2 = f.grid().spacing() * f.grid().spacing();
  double m = 0.0;
  for (std::size_t i = 1; i + 1 < f.size(); ++i) m = std::max(m, std::abs(f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2);
  return m;
}

}  // namespace quench
