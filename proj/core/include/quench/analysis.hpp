#pragma once

// Checks of the touchdown theory against discrete solutions: profile lower
// bounds near the origin, the w = v^β flux diagnostic, comparison and
// supersolution harnesses, the quench-time bound, and refinement studies.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "quench/domain.hpp"
#include "quench/grid.hpp"
#include "quench/solver.hpp"

namespace quench {

// Radius interval [lo, hi] used by the profile checks.
struct Window {
  double lo = 0.0;
  double hi = 0.0;
};

// [2h, R/2]: excludes origin stencil pollution and the boundary layer.
Window default_profile_window(const RadialGrid& grid);

// 5 h² · max |second difference of v|.
double profile_tolerance(const RadialField& v);

// v = 1 - u.
RadialField gap_field(const RadialField& u);

struct ProfileCheck {
  bool pass = false;
  double margin = 0.0;     // min over window of v(r) - C r^p
  double tolerance = 0.0;  // tol_profile of the snapshot
};

// pass iff min over the window of v(r) - C r^exponent ≥ -tol_profile.
ProfileCheck check_profile_lower_bound(const RadialField& v, double exponent, double C,
                                       std::optional<Window> window = std::nullopt);

// min over window of v(r) / r^exponent; the empirical constant in v ≥ C r^p.
double min_ratio(const RadialField& v, double exponent, Window window);

struct ProfileFit {
  Window window;
  double exponent = 0.0;
  double coefficient = 0.0;
  std::size_t nodes = 0;
};

// Least-squares fit of log v = log C + p log r over the window nodes.
// Throws InvalidArgument with fewer than 8 nodes ("window too narrow") or v ≤ 0.
ProfileFit fit_profile_exponent(const RadialField& v, Window window);

struct TransformDiagnostic {
  double beta = 0.0;
  double epsilon = 0.0;
  double qtilde_min = 0.0;      // min of r^{n-1} ∂_r(v^β) - ε rⁿ
  double q_abs_max = 0.0;       // max |q|, scale for the q̃ tolerance
  double profile_margin = 0.0;  // min of v - (ε/2)^{1/β} r^{2/β}
  // min over snapshots of (that snapshot's margin + its tol_profile);
  // ≥ 0 means the lower bound holds at every recorded time.
  double profile_slack = 0.0;
  double profile_tolerance = 0.0;  // tol_profile of the snapshot attaining profile_slack
  std::size_t snapshots = 0;

  double qtilde_tolerance() const { return 1e-6 * q_abs_max; }
  bool qtilde_pass() const { return qtilde_min >= -qtilde_tolerance(); }
  bool profile_pass() const { return profile_slack >= 0.0; }
};

// Scans every node of every snapshot (fields of u). q uses centered
// differences, one-sided at r = R and the even extension at r = 0.
TransformDiagnostic check_qtilde_nonneg(std::span<const Snapshot> snapshots, double beta, double epsilon);

// (min over trace of boundary_flux) / R; nullopt when that is ≤ 0.
std::optional<double> estimate_c2(std::span<const TraceRecord> trace, double R);

struct ComparisonResult {
  double max_violation = 0.0;
  double tolerance = 0.0;
  std::size_t steps = 0;
  double t_end = 0.0;
};

// Runs u₁ (from p1) and u₂ (from p2) in lockstep with dt = min of both
// controllers' choices and returns max (u₁ - u₂)⁺ over every step. Stops when
// either run quenches or t_max is reached. p1 and p2 must share (n, R, λ, χ).
// The observers, when set, see every accepted state of the respective run.
ComparisonResult check_comparison(const ProblemParams& p1, const ProblemParams& p2, std::size_t M,
                                  const StepControl& ctl, const StepObserver& observe1 = {},
                                  const StepObserver& observe2 = {});

inline constexpr double kComparisonTolerance = 1e-12;

// (v - ψ)⁺ over the run's snapshots with t < 1/(λ δ₁ c₀), each compared with
// its own tol_profile. nullopt unless λ > 2n/(δ₁R²).
struct SupersolutionCheck {
  double max_violation = 0.0;  // max (v - ψ)⁺
  double tolerance = 0.0;      // tol_profile of the tightest snapshot
  double margin = 0.0;         // min over snapshots of tol_profile - violation
  std::size_t snapshots_used = 0;
  bool pass = false;
};
std::optional<SupersolutionCheck> check_supersolution(const RunResult& run, const ProblemParams& p, double delta1);

struct QuenchBoundCheck {
  bool applicable = false;
  bool pass = false;
  double delta1 = 0.0;
  double bound = 0.0;
  double T_hi = 0.0;
  std::string reason;
};

inline constexpr double kQuenchBoundSlack = 1e-2;

// Uses δ̂₁ = report.delta1_hat. applicable iff quenched and λ > 2n/(δ̂₁R²);
// pass iff T_hi ≤ bound · (1 + 1e-2).
QuenchBoundCheck verify_quench_time_bound(const QuenchReport& report, const ProblemParams& p);

// Same test with an externally supplied δ₁ (e.g. the a priori value of the
// constant chain); applicable additionally requires min A over the trace ≥ δ₁.
QuenchBoundCheck verify_quench_time_bound(const QuenchReport& report, const ProblemParams& p, double delta1);

// Every trace prefix [0, t] is itself a solution interval, so whenever
// λ A_min(t) R² > 2n the elapsed time must satisfy t ≤ bound(A_min(t)).
struct PrefixBoundCheck {
  std::size_t rows_applicable = 0;
  double last_applicable_t = 0.0;
  double worst_ratio = 0.0;  // max over applicable rows of t / bound
  bool pass = true;
};
PrefixBoundCheck verify_prefix_bounds(std::span<const TraceRecord> trace, const ProblemParams& p);

struct IntegralCheck {
  double max_I = 0.0;
  bool applicable = false;  // n ≥ 3
  bool pass = false;
  double growth = 0.0;      // max_I / I at the second-to-last snapshot - 1
};

// Boundedness proxy for ∫ dz / (1 - u): for n ≥ 3 the run maximum may exceed
// the value at the second-to-last snapshot by at most 10%. Informational for n < 3.
IntegralCheck check_integral_bounded(const RunResult& run, int n);

struct ConvergenceRow {
  std::size_t M = 0;
  double h = 0.0;
  double T_hi = 0.0;
  double quench_radius = 0.0;
};

struct ConvergenceStudy {
  std::vector<ConvergenceRow> rows;
  // log₂(|T(M₁) - T(M₂)| / |T(M₂) - T(M₃)|) over the last three entries.
  double order = 0.0;
};

// Throws InvalidArgument if M_list is not strictly increasing with ≥ 3 entries,
// SolverError if any run fails to quench, and InvalidArgument if successive
// differences vanish (order undefined).
ConvergenceStudy convergence_study(const ProblemParams& p, std::span<const std::size_t> M_list, const StepControl& ctl);

// Structural properties every accepted state must keep. Attach observe() to
// run_to_quench; violations are counted, not thrown.
class InvariantMonitor {
public:
  InvariantMonitor(const ProblemParams& p, bool expect_monotone, double monotone_tol = 1e-12);

  void observe(const SolutionState& s, const TraceRecord& rec);
  StepObserver observer();

  bool ok() const;
  std::string summary() const;

  std::size_t states_seen = 0;
  std::size_t positivity_violations = 0;
  std::size_t boundary_violations = 0;
  std::size_t monotone_violations = 0;
  std::size_t a_bound_violations = 0;
  std::size_t gap_violations = 0;  // u ≥ 1
  double worst_monotone_excess = 0.0;
  double max_sup_u = 0.0;

private:
  double a_ceiling_;
  bool expect_monotone_;
  double monotone_tol_;
};

// Constant chain for theorem9 mode, driven by a pilot run: c₁ from the initial data,
// c₂ from the pilot's boundary flux, then ε → δ₁ → λ₀ → λ₁ at the given λ.
struct ConstantChain {
  double c1 = 0.0;
  double c2 = 0.0;
  double A0 = 0.0;
  BoundSet bounds;
};

// Throws InvalidArgument when the initial data fails the concavity
// hypotheses, when c₂ cannot be estimated, or when no admissible ε exists.
ConstantChain build_constant_chain(const ProblemParams& p, double beta, std::span<const TraceRecord> pilot_trace,
                                   double lambda);

}  // namespace quench
