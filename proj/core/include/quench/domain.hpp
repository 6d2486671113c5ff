#pragma once

// Problem definition for the radially symmetric nonlocal MEMS equation
//
//   u_t = Δu + λ / ((1 - u)^2 (1 + χ ∫_{B_R} dz / (1 - u))^2)   in B_R × (0, T)
//   u = 0 on ∂B_R,  u(·, 0) = u₀,
//
// together with the closed-form constants that bound its touchdown time.
// Every formula here is a total function: when a hypothesis fails the result
// is std::nullopt rather than an exception, so parameter sweeps can tabulate
// the region where each bound applies.

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace quench {

enum class InitialKind { zero, parabolic, sampled };

// Radially symmetric initial deflection u₀(r) together with the constants
// a (upper bound, a < 1) and b (lower bound, u₀ ≥ -b) it is declared with.
struct InitialData {
  InitialKind kind = InitialKind::zero;
  double a = 0.5;
  double b = 0.0;
  // (r, u₀(r)) pairs, strictly increasing in r; only used by the sampled kind.
  std::vector<std::pair<double, double>> samples;

  static InitialData zero(double a = 0.5);
  // u₀(r) = a (1 - r²/R²).
  static InitialData parabolic(double a);
  static InitialData sampled(std::vector<std::pair<double, double>> samples, double a, double b = 0.0);

  // Evaluates u₀ at radius r in a ball of radius R. Sampled data is linearly
  // interpolated; throws InvalidArgument if r lies outside the sampled range.
  double value(double r, double R) const;
};

std::string to_string(InitialKind kind);

struct ProblemParams {
  int n = 1;
  double R = 1.0;
  double lambda = 0.0;
  double chi = 0.0;
  InitialData initial;
};

// Throws InvalidArgument unless n ≥ 1, R > 0, λ ≥ 0, χ ≥ 0 and all finite.
void check_params(const ProblemParams& p);

// Which set of hypotheses on u₀ to check.
enum class Hypothesis { lemma7, theorem8, theorem9 };

std::string to_string(Hypothesis h);

struct InitialDataCheck {
  std::vector<std::string> violations;
  // Largest c₁ with u₀'' ≤ -c₁ on [0, R]; theorem9 mode only.
  std::optional<double> c1;
  // Whether u₀'(R) < 0. Needed for the convex-domain results only; recorded
  // so reports can show that u₀ ≡ 0 fails it while still admissible for lemma7.
  bool boundary_slope_negative = false;

  bool ok() const { return violations.empty(); }
};

// Returns the list of hypothesis violations (empty when u₀ is admissible).
// Sampled data that does not cover [0, R] throws InvalidArgument
// ("incomplete profile").
InitialDataCheck validate_initial_data(const ProblemParams& p, Hypothesis mode);

// Surface measure ω_{n-1} = 2 π^{n/2} / Γ(n/2) of the unit sphere in ℝⁿ.
double unit_sphere_area(int n);

// |B_R| = ω_{n-1} Rⁿ / n.
double ball_volume(int n, double R);

// 1 - 2n / (λ δ₁ R²). May be ≤ 0; the caller decides.
double c0_of(double lambda, double delta1, int n, double R);

// 1 / (λ δ₁ c₀); nullopt unless λ > 2n / (δ₁ R²).
std::optional<double> quench_time_upper_bound(double lambda, double delta1, int n, double R);

// ψ(r, t) = 1 - λ δ₁ c₀ t (1 - r²/R²), the explicit supersolution for the gap v = 1 - u.
double supersolution_psi(double r, double t, double lambda, double delta1, double c0, double R);

// [1 + χ ω_{n-1} (2/ε)^{1/β} (n - 2/β)^{-1} R^{n - 2/β}]^{-2}.
// nullopt unless 2 < β < 3, ε > 0, χ ≥ 0.
std::optional<double> delta1_bound(double epsilon, double chi, double beta, int n, double R);

// β min(c₁ (1-a)^{β-1}, c₂), the strict upper limit for ε.
// nullopt unless c₁ > 0, c₂ > 0, 0 < a < 1, 2 < β < 3.
std::optional<double> epsilon_budget(double c1, double a, double c2, double beta);

// 2 ε n (β - 1) / (β (3 - β) δ₁); callers must use λ strictly above it.
// nullopt unless 2 < β < 3, δ₁ > 0, ε > 0.
std::optional<double> lambda0_threshold(double epsilon, double beta, double delta1, int n);

// max(λ₀, 4n/(δ₁R²), 3/δ₁). Requires δ₁ > 0.
double lambda1_threshold(double lambda0, double delta1, int n, double R);

// Every closed-form constant for one parameter set.
struct BoundSet {
  double delta1 = 0.0;
  double epsilon = 0.0;
  double epsilon_limit = 0.0;
  double lambda0 = 0.0;
  double lambda1 = 0.0;
  // Evaluated at the λ the set was built for.
  double c0 = 0.0;
  std::optional<double> t_upper;
  // Number of times ε was halved before A(0) > δ₁ held.
  int epsilon_halvings = 0;
};

// Inputs to the constant chain ε → δ₁ → λ₀ → λ₁.
struct ConstantChainInput {
  int n = 1;
  double R = 1.0;
  double chi = 0.0;
  double beta = 2.5;
  double a = 0.5;   // sup u₀
  double c1 = 0.0;  // uniform concavity of u₀
  double c2 = 0.0;  // lower bound of v_r(R, t) / R
  double A0 = 1.0;  // nonlocal factor at t = 0
};

// Picks ε = 0.9 × epsilon_budget, then halves it (at most 40 times) until
// A(0) > δ₁(ε); derives λ₀, λ₁, and c₀ / T bound at the given λ.
// nullopt when the budget is undefined or no ε satisfies A(0) > δ₁.
std::optional<BoundSet> select_constants(const ConstantChainInput& in, double lambda);

inline constexpr double kEpsilonSafety = 0.9;
inline constexpr int kMaxEpsilonHalvings = 40;

}  // namespace quench
