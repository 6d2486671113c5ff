#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "quench/error.hpp"
#include "quench/grid.hpp"

using namespace quench;

TEST(Grid, Layout) {
  const RadialGrid g(1, 1.0, 101);
  EXPECT_DOUBLE_EQ(g.spacing(), 0.01);
  EXPECT_DOUBLE_EQ(g.node(50), 0.5);
  EXPECT_EQ(g.node(0), 0.0);
  EXPECT_EQ(RadialGrid(3, 2.0, 17).node(16), 2.0);
  EXPECT_THROW(RadialGrid(2, 1.0, 15), InvalidArgument);
  EXPECT_THROW(RadialGrid(0, 1.0, 64), InvalidArgument);
  EXPECT_THROW(RadialGrid(1, -1.0, 64), InvalidArgument);
}

TEST(Grid, FieldArgmaxPrefersOrigin) {
  const RadialGrid g(1, 1.0, 16);
  RadialField f(g, std::vector<double>(16, 0.5));
  EXPECT_EQ(f.argmax(), 0u);
  f[7] = 0.75;
  f[9] = 0.75;
  EXPECT_EQ(f.argmax(), 7u);
  EXPECT_EQ(f.max(), 0.75);
}

TEST(Laplacian, ExactOnRadialQuadratics) {
  for (int n = 1; n <= 3; ++n) {
    const RadialGrid g(n, 1.0, 41);
    const RadialField f = RadialField::from_function(g, [](double r) { return 1.0 - r * r; });
    const RadialField L = radial_laplacian_apply(f);
    for (std::size_t i = 0; i + 1 < g.size(); ++i) EXPECT_NEAR(L[i], -2.0 * n, 1e-9) << "n=" << n << " i=" << i;
    // The one-sided boundary estimate is exact on quadratics as well.
    EXPECT_NEAR(L[g.size() - 1], -2.0 * n, 1e-8);
  }
  const RadialGrid g3(3, 1.0, 33);
  const RadialField r2 = RadialField::from_function(g3, [](double r) { return r * r; });
  EXPECT_NEAR(radial_laplacian_apply(r2)[0], 6.0, 1e-12);
}

TEST(Laplacian, ConstantsAndLinearity) {
  const RadialGrid g(2, 1.5, 33);
  const RadialField c(g, std::vector<double>(33, 3.25));
  const RadialField Lc = radial_laplacian_apply(c);
  for (double x : Lc.values()) EXPECT_EQ(x, 0.0);

  const RadialField f = RadialField::from_function(g, [](double r) { return std::cos(r); });
  RadialField shifted = f;
  RadialField scaled = f;
  for (std::size_t i = 0; i < f.size(); ++i) {
    shifted[i] += 7.0;
    scaled[i] *= -2.5;
  }
  const RadialField L = radial_laplacian_apply(f);
  const RadialField Ls = radial_laplacian_apply(shifted);
  const RadialField Lk = radial_laplacian_apply(scaled);
  for (std::size_t i = 0; i < f.size(); ++i) {
    EXPECT_NEAR(Ls[i], L[i], 1e-9);
    EXPECT_NEAR(Lk[i], -2.5 * L[i], 1e-10);
  }
}

TEST(Laplacian, SecondOrderOnSmoothData) {
  // Δ cos r in n = 3: -cos r - 2 sin r / r.
  auto err = [](std::size_t M) {
    const RadialGrid g(3, 1.0, M);
    const RadialField f = RadialField::from_function(g, [](double r) { return std::cos(r); });
    const RadialField L = radial_laplacian_apply(f);
    double e = 0.0;
    for (std::size_t i = 1; i + 1 < M; ++i) {
      const double r = g.node(i);
      e = std::max(e, std::abs(L[i] - (-std::cos(r) - 2.0 * std::sin(r) / r)));
    }
    return std::max(e, std::abs(L[0] + 3.0));
  };
  EXPECT_GT(err(33) / err(65), 3.5);
}

TEST(Laplacian, StencilMatchesApply) {
  const RadialGrid g(3, 1.0, 21);
  const LaplacianStencil s = radial_laplacian_stencil(g);
  const RadialField f = RadialField::from_function(g, [](double r) { return std::exp(-r) * (1.0 + r); });
  const RadialField L = radial_laplacian_apply(f);
  for (std::size_t i = 0; i + 1 < g.size(); ++i) {
    const double lo = i == 0 ? 0.0 : s.lower[i] * f[i - 1];
    EXPECT_NEAR(lo + s.diag[i] * f[i] + s.upper[i] * f[i + 1], L[i], 1e-10);
  }
}

TEST(Quadrature, BallVolumes) {
  const RadialGrid g1(1, 1.0, 101);
  EXPECT_NEAR(ball_integral(RadialField(g1, std::vector<double>(101, 1.0))), 2.0, 1e-14);
  const RadialGrid g2(2, 1.0, 101);
  EXPECT_NEAR(ball_integral(RadialField(g2, std::vector<double>(101, 1.0))), std::numbers::pi, 1e-13);
  EXPECT_EQ(ball_integral(RadialField(g2)), 0.0);
  const RadialGrid g3(3, 1.0, 201);
  EXPECT_NEAR(ball_integral(RadialField(g3, std::vector<double>(201, 1.0))), 4.0 / 3.0 * std::numbers::pi, 1e-4);
}

TEST(Quadrature, SecondOrder) {
  // ∫_{B_1} e^{-r²} dz in n = 3 = π^{3/2} erf(1) - 2π/e.
  const double exact = std::pow(std::numbers::pi, 1.5) * std::erf(1.0) - 2.0 * std::numbers::pi / std::numbers::e;
  auto err = [&](std::size_t M) {
    const RadialGrid g(3, 1.0, M);
    return std::abs(ball_integral(RadialField::from_function(g, [](double r) { return std::exp(-r * r); })) - exact);
  };
  EXPECT_GT(err(51) / err(101), 3.5);
  EXPECT_GT(err(101) / err(201), 3.5);
}

TEST(BoundaryDerivative, Stencil) {
  const RadialGrid g(1, 1.0, 101);
  EXPECT_NEAR(boundary_derivative(RadialField::from_function(g, [](double r) { return r * r; })), 2.0, 1e-10);
  EXPECT_EQ(boundary_derivative(RadialField(g, std::vector<double>(101, 0.4))), 0.0);
  EXPECT_NEAR(boundary_derivative(RadialField::from_function(g, [](double r) { return r; })), 1.0, 1e-12);
}

TEST(RadialDerivative, OneSidedEnds) {
  const RadialGrid g(2, 1.0, 51);
  const RadialField d = radial_derivative(RadialField::from_function(g, [](double r) { return 3.0 * r * r - r; }));
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(d[i], 6.0 * g.node(i) - 1.0, 1e-10);
}

TEST(SecondDifference, MaxAbs) {
  const RadialGrid g(1, 1.0, 21);
  EXPECT_NEAR(max_abs_second_difference(RadialField::from_function(g, [](double r) { return -4.0 * r * r; })), 8.0, 1e-9);
}
