// Randomized properties with fixed seeds; every failure message carries the
// generated case so it can be replayed.

#include <cfloat>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "quench/analysis.hpp"
#include "quench/domain.hpp"
#include "quench/io.hpp"

using namespace quench;

namespace {

class Gen {
public:
  explicit Gen(unsigned seed) : rng_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  // Non-increasing samples on [0, R] from a ≥ u₀(0) down to 0 at R.
  InitialData monotone_profile(double R) {
    const int k = integer(3, 12);
    std::vector<double> drops(k);
    double total = 0.0;
    for (double& d : drops) total += d = uniform(0.0, 1.0);
    const double a = uniform(0.05, 0.8);
    std::vector<std::pair<double, double>> s;
    double u = a;
    for (int i = 0; i <= k; ++i) {
      s.emplace_back(R * i / k, i == k ? 0.0 : u);
      if (i < k) u = std::max(0.0, u - a * drops[i] / total);
    }
    return InitialData::sampled(std::move(s), a);
  }

private:
  std::mt19937 rng_;
};

constexpr int kCases = 200;

}  // namespace

TEST(DomainProperties, QuenchBoundDecreasing) {
  Gen g(11);
  for (int k = 0; k < kCases; ++k) {
    const int n = g.integer(1, 3);
    const double R = g.uniform(0.5, 2.0), d1 = g.uniform(0.01, 1.0);
    const double lam = 2.0 * n / (d1 * R * R) * g.uniform(1.01, 50.0);
    const double t = *quench_time_upper_bound(lam, d1, n, R);
    SCOPED_TRACE(::testing::Message() << "n=" << n << " R=" << R << " d1=" << d1 << " lam=" << lam);
    EXPECT_GT(t, 0.0);
    EXPECT_LT(*quench_time_upper_bound(lam * 1.1, d1, n, R), t);
    EXPECT_LT(*quench_time_upper_bound(lam, d1 * 1.1, n, R), t);
  }
}

TEST(DomainProperties, Delta1InUnitInterval) {
  Gen g(12);
  for (int k = 0; k < kCases; ++k) {
    const int n = g.integer(1, 3);
    const double eps = g.log_uniform(1e-4, 10.0), beta = g.uniform(2.001, 2.999), R = g.uniform(0.2, 3.0);
    const double chi = k % 5 == 0 ? 0.0 : g.log_uniform(1e-4, 10.0);
    const double d = *delta1_bound(eps, chi, beta, n, R);
    SCOPED_TRACE(::testing::Message() << "eps=" << eps << " chi=" << chi << " beta=" << beta << " n=" << n);
    EXPECT_GT(d, 0.0);
    EXPECT_LE(d, 1.0);
    EXPECT_EQ(d == 1.0, chi == 0.0);
  }
}

TEST(DomainProperties, Lambda1DominatesLambda0) {
  Gen g(13);
  for (int k = 0; k < kCases; ++k) {
    const double l0 = g.log_uniform(1e-3, 1e4), d1 = g.uniform(1e-3, 1.0), R = g.uniform(0.1, 10.0);
    const int n = g.integer(1, 3);
    const double l1 = lambda1_threshold(l0, d1, n, R);
    EXPECT_GE(l1, l0);
    EXPECT_GE(l1, 3.0 / d1);
    EXPECT_GE(l1, 4.0 * n / (d1 * R * R));
  }
}

TEST(DomainProperties, SupersolutionLaplacianConstant) {
  Gen g(14);
  for (int k = 0; k < 50; ++k) {
    const int n = g.integer(1, 3);
    const double R = g.uniform(0.5, 2.0), d1 = g.uniform(0.05, 1.0);
    const double lam = 2.0 * n / (d1 * R * R) * g.uniform(1.1, 10.0);
    const double c0 = c0_of(lam, d1, n, R);
    const double t = g.uniform(0.0, 1.0) / (lam * d1 * c0);
    const RadialGrid grid(n, R, 65);
    const RadialField psi =
        RadialField::from_function(grid, [&](double r) { return supersolution_psi(r, t, lam, d1, c0, R); });
    const RadialField L = radial_laplacian_apply(psi);
    const double want = 2.0 * n * lam * d1 * c0 * t / (R * R);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) EXPECT_NEAR(L[i], want, 1e-8 * (1.0 + want));
    // Affine in t at fixed r.
    const double r = g.uniform(0.0, R);
    const double p0 = supersolution_psi(r, 0.0, lam, d1, c0, R), p1 = supersolution_psi(r, t, lam, d1, c0, R);
    EXPECT_NEAR(supersolution_psi(r, 2.0 * t, lam, d1, c0, R), 2.0 * p1 - p0, 1e-13);
  }
}

TEST(DomainProperties, ConcavityMatchesSecondDifference) {
  Gen g(15);
  for (int k = 0; k < 50; ++k) {
    ProblemParams p;
    p.n = g.integer(1, 3);
    p.R = g.uniform(0.5, 2.0);
    const double a = g.uniform(0.05, 0.95);
    p.initial = InitialData::parabolic(a);
    const auto chk = validate_initial_data(p, Hypothesis::theorem9);
    ASSERT_TRUE(chk.ok());
    EXPECT_NEAR(*chk.c1, 2.0 * a / (p.R * p.R), 1e-12 * *chk.c1);
    const RadialGrid grid(p.n, p.R, 101);
    const RadialField u = RadialField::from_function(grid, [&](double r) { return p.initial.value(r, p.R); });
    EXPECT_NEAR(max_abs_second_difference(u), *chk.c1, 1e-8 * *chk.c1);
  }
}

TEST(GridProperties, LaplacianAffine) {
  Gen g(21);
  for (int k = 0; k < 50; ++k) {
    const int n = g.integer(1, 3);
    const RadialGrid grid(n, g.uniform(0.5, 2.0), static_cast<std::size_t>(g.integer(16, 200)));
    const double alpha = g.uniform(-2.0, 2.0), gamma = g.uniform(-3.0, 3.0), c = g.uniform(-5.0, 5.0);
    const RadialField f = RadialField::from_function(grid, [&](double r) { return alpha + gamma * r * r; });
    const RadialField L = radial_laplacian_apply(f);
    RadialField shifted = f;
    for (std::size_t i = 0; i < f.size(); ++i) shifted[i] = c * f[i] + 1.0;
    const RadialField Ls = radial_laplacian_apply(shifted);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      EXPECT_NEAR(L[i], 2.0 * n * gamma, 1e-7 * (1.0 + std::abs(gamma)));
      EXPECT_NEAR(Ls[i], c * L[i], 1e-7 * (1.0 + std::abs(c * gamma)));
    }
  }
}

TEST(SolverProperties, InvariantsOnRandomRuns) {
  Gen g(31);
  for (int k = 0; k < 24; ++k) {
    ProblemParams p;
    p.n = g.integer(1, 3);
    p.R = g.uniform(0.5, 1.5);
    p.lambda = g.log_uniform(0.1, 300.0);
    p.chi = k % 4 == 0 ? 0.0 : g.log_uniform(1e-3, 2.0);
    p.initial = k % 3 == 0 ? InitialData::zero() : k % 3 == 1 ? InitialData::parabolic(g.uniform(0.0, 0.9))
                                                              : g.monotone_profile(p.R);
    StepControl ctl;
    ctl.t_max = 0.5;
    ctl.safety = g.uniform(0.1, 1.0);
    const std::size_t M = static_cast<std::size_t>(g.integer(16, 120));
    SCOPED_TRACE(::testing::Message() << "case " << k << " n=" << p.n << " R=" << p.R << " lambda=" << p.lambda
                                      << " chi=" << p.chi << " M=" << M);
    InvariantMonitor mon(p, true);
    const RunResult r = run_to_quench(p, M, ctl, mon.observer());
    EXPECT_TRUE(mon.ok()) << mon.summary();
    for (std::size_t j = 0; j + 1 < r.trace.size(); ++j) EXPECT_GT(r.trace[j].gap, 0.0);
    if (r.report.quenched) {
      EXPECT_LT(r.report.T_lo, r.report.T_hi);
      EXPECT_LE(r.report.T_hi - r.report.T_lo, r.trace.back().dt + 4.0 * DBL_EPSILON * r.report.T_hi);
      EXPECT_GE(r.report.quench_radius, 0.0);
      EXPECT_LE(r.report.quench_radius, p.R);
      EXPECT_EQ(r.report.quench_index, 0u);
    }
    const RunResult again = run_to_quench(p, M, ctl);
    EXPECT_EQ(io::trace_csv(r.trace), io::trace_csv(again.trace));
  }
}

TEST(SolverProperties, LocalComparisonOnOrderedData) {
  Gen g(41);
  for (int k = 0; k < 12; ++k) {
    ProblemParams lo, hi;
    lo.n = hi.n = g.integer(1, 3);
    lo.lambda = hi.lambda = g.log_uniform(0.5, 100.0);
    const double a = g.uniform(0.0, 0.4);
    lo.initial = InitialData::parabolic(a);
    hi.initial = InitialData::parabolic(a + g.uniform(0.0, 0.4));
    StepControl ctl;
    ctl.t_max = 0.3;
    const ComparisonResult c = check_comparison(lo, hi, 81, ctl);
    EXPECT_LE(c.max_violation, kComparisonTolerance) << "n=" << lo.n << " lambda=" << lo.lambda;
  }
}

TEST(SolverProperties, NonlocalFactorBelowCeiling) {
  Gen g(51);
  for (int k = 0; k < kCases; ++k) {
    const int n = g.integer(1, 3);
    const double R = g.uniform(0.3, 2.0), chi = g.log_uniform(1e-3, 10.0);
    const RadialGrid grid(n, R, 64);
    const InitialData d = g.monotone_profile(R);
    const RadialField u = RadialField::from_function(grid, [&](double r) { return d.value(r, R); });
    const NonlocalFactor f = nonlocal_factor(u, chi);
    const double ceiling = 1.0 / ((1.0 + chi * ball_volume(n, R)) * (1.0 + chi * ball_volume(n, R)));
    EXPECT_LE(f.A, ceiling * (1.0 + 1e-14));
    EXPECT_NEAR(f.A, 1.0 / ((1.0 + chi * f.I) * (1.0 + chi * f.I)), 1e-15);
  }
}
