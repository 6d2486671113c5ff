#pragma once

// Radial discretization of the ball B_R ⊂ ℝⁿ on a uniform node set
// r_i = i h, i = 0..M-1, h = R / (M - 1).

#include <cstddef>
#include <span>
#include <vector>

namespace quench {

inline constexpr std::size_t kMinGridNodes = 16;

class RadialGrid {
public:
  // Throws InvalidArgument for M < 16 ("grid too coarse"), R ≤ 0 or n < 1.
  RadialGrid(int n, double R, std::size_t M);

  int dimension() const { return n_; }
  double radius() const { return R_; }
  std::size_t size() const { return M_; }
  double spacing() const { return h_; }

  // r_i; the last node is exactly R.
  double node(std::size_t i) const { return i + 1 == M_ ? R_ : static_cast<double>(i) * h_; }
  std::vector<double> nodes() const;

  bool operator==(const RadialGrid&) const = default;

private:
  int n_;
  double R_;
  std::size_t M_;
  double h_;
};

// Samples of a radial function on a grid.
class RadialField {
public:
  explicit RadialField(const RadialGrid& grid);
  RadialField(const RadialGrid& grid, std::vector<double> values);

  template <typename F>
  static RadialField from_function(const RadialGrid& grid, F&& f) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) v[i] = f(grid.node(i));
    return RadialField(grid, std::move(v));
  }

  const RadialGrid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  // Index of the maximum; ties resolve to the smallest radius.
  std::size_t argmax() const;
  double max() const;

  bool operator==(const RadialField&) const = default;

private:
  RadialGrid grid_;
  std::vector<double> values_;
};

// Tridiagonal rows of the discrete radial Laplacian (1/r^{n-1}) (r^{n-1} f_r)_r.
// Row i couples nodes i-1, i, i+1. The origin row uses the even-extension rule
// Δf(0) = n f''(0) ≈ 2n (f_1 - f_0)/h². The last row is left empty: the
// boundary needs a condition from the caller.
struct LaplacianStencil {
  std::vector<double> lower;
  std::vector<double> diag;
  std::vector<double> upper;
};

LaplacianStencil radial_laplacian_stencil(const RadialGrid& grid);

// Second-order radial Laplacian. Exact on radial quadratics α + γ r² at the
// origin and interior nodes. The last entry is a one-sided estimate and must
// be replaced by whatever boundary condition the caller imposes.
RadialField radial_laplacian_apply(const RadialField& f);

// ω_{n-1} ∫_0^R g(r) r^{n-1} dr by the trapezoid rule, i.e. ∫_{B_R} g dz.
double ball_integral(const RadialField& g);

// (3 f_{M-1} - 4 f_{M-2} + f_{M-3}) / (2h).
double boundary_derivative(const RadialField& f);

// f_r at every node: centered in the interior, one-sided second order at both ends.
RadialField radial_derivative(const RadialField& f);

// max_i |f_{i+1} - 2 f_i + f_{i-1}| / h² over interior nodes.
double max_abs_second_difference(const RadialField& f);

}  // namespace quench
