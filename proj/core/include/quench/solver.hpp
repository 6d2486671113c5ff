#pragma once

// IMEX time integration of the radial nonlocal MEMS equation up to touchdown.
//
// Diffusion is implicit (one tridiagonal solve per step), the source
// λ A(t) / (1 - u)² and the nonlocal factor A(t) are lagged at the old time
// level. With nonnegative data the implicit matrix is an M-matrix for n ≤ 3,
// so accepted steps keep 0 ≤ u and preserve both ordering and monotone
// profiles.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "quench/domain.hpp"
#include "quench/grid.hpp"

namespace quench {

struct NonlocalFactor {
  double A = 1.0;  // (1 + χ I)^{-2}
  double I = 0.0;  // ∫_{B_R} dz / (1 - u)
};

// Throws TouchdownError if u ≥ 1 at any node.
NonlocalFactor nonlocal_factor(const RadialField& u, double chi);

struct SolutionState {
  double time = 0.0;
  RadialField u;
  double A = 1.0;
  double I = 0.0;
};

// u(·, 0) = u₀ sampled on the grid, with A and I evaluated.
SolutionState make_initial_state(const ProblemParams& p, const RadialGrid& grid);

struct StepControl {
  double safety = 0.25;
  double dt_max = 1e-2;
  double quench_tol = 1e-3;
  double t_max = 10.0;
  // Stop early once the max-norm of the discrete right-hand side drops below
  // this; 0 disables the test.
  double steady_tol = 0.0;
  std::size_t residual_interval = 32;
  // Keep every k-th trace row (plus the first and last). Running minima and
  // the observer still see every step.
  std::size_t trace_stride = 1;
  // Gap thresholds (descending) at which a snapshot is taken.
  std::vector<double> snapshot_gaps{0.5, 0.25, 0.1, 0.05, 0.02, 0.01};
  int max_bisections = 60;
};

// Throws InvalidArgument unless every field is in range.
void check_control(const StepControl& ctl);

// Δ_h u with the Dirichlet row zeroed, plus λ A / (1 - u)² at interior nodes,
// using the A cached in the state. Throws TouchdownError if u ≥ 1.
RadialField rhs_eval(const SolutionState& s, const ProblemParams& p);

// Max-norm of rhs_eval over the nodes that carry an equation.
double steady_residual(const SolutionState& s, const ProblemParams& p);

struct StepSize {
  double dt = 0.0;
  double diffusion_cap = 0.0;  // σ h² / (2n)
  double source_cap = 0.0;     // σ g³ / (2 λ A); +inf when λ = 0
};

// dt = min(dt_max, σ h² / (2n), σ g³ / (2 λ A)) where g = 1 - sup u.
StepSize choose_dt(const SolutionState& s, const StepControl& ctl, double lambda);

enum class StepStatus { accepted, overshoot };

struct StepResult {
  StepStatus status = StepStatus::accepted;
  SolutionState state;
};

// One IMEX step: (Id - dt Δ_h) u_new = u_old + dt λ A_old / (1 - u_old)²,
// u_new(R) = 0. Reports overshoot (state left at the old level) when any
// u_new ≥ 1 - τ_q/10, so the driver can retry with a smaller dt.
StepResult step_imex(const SolutionState& s, double dt, const ProblemParams& p, double quench_tol);

// Reusable form of step_imex for one (problem, grid) pair: the stencil,
// quadrature weights and work arrays are built once.
class ImexIntegrator {
public:
  ImexIntegrator(const ProblemParams& p, const RadialGrid& grid);

  // Advances s by dt in place. Returns StepStatus::overshoot and leaves s
  // untouched when any u_new ≥ 1 - τ_q/10.
  StepStatus advance(SolutionState& s, double dt, double quench_tol);

  // (A, I) for a field on this integrator's grid; throws TouchdownError if u ≥ 1.
  NonlocalFactor nonlocal(std::span<const double> u) const;

private:
  ProblemParams params_;
  RadialGrid grid_;
  LaplacianStencil stencil_;
  std::vector<double> weights_;  // ball quadrature weights

  // Thomas factorization of the difference system, valid for factor_dt_.
  void factor(double dt);
  double factor_dt_ = -1.0;
  std::vector<double> lower_, multiplier_, inv_pivot_;
  std::vector<double> rhs_, next_;
};

struct QuenchPoint {
  std::size_t index = 0;
  double radius = 0.0;
  double value = 0.0;
};

// The argmax node (smallest radius on ties) when sup u ≥ 1 - τ_q.
std::optional<QuenchPoint> detect_quench(const SolutionState& s, double quench_tol);

struct TraceRecord {
  std::size_t step = 0;
  double t = 0.0;
  double dt = 0.0;
  double sup_u = 0.0;
  double gap = 1.0;
  double A = 1.0;
  double I = 0.0;
  double boundary_flux = 0.0;  // v_r(R, t) = -u_r(R, t)
  double A_running_min = 1.0;
  // Both step-size caps in force when dt was chosen (not written to CSV).
  double diffusion_cap = 0.0;
  double source_cap = 0.0;
};

struct Snapshot {
  double t = 0.0;
  // Gap threshold that triggered the snapshot; unset for the initial state.
  std::optional<double> gap_threshold;
  RadialField u;
};

enum class StopReason { quenched, time_limit, steady };

struct QuenchReport {
  bool quenched = false;
  StopReason reason = StopReason::time_limit;
  double T_lo = 0.0;  // last time with sup u < 1 - τ_q
  double T_hi = 0.0;  // first time with sup u ≥ 1 - τ_q
  double quench_radius = 0.0;
  std::size_t quench_index = 0;
  double delta1_hat = 1.0;  // min of A over the run
  double max_I = 0.0;
  double steady_residual = 0.0;
  std::size_t steps = 0;
  std::vector<Snapshot> snapshots;
};

struct RunResult {
  QuenchReport report;
  std::vector<TraceRecord> trace;
  SolutionState final_state;
};

// Called after the initial state and after every accepted step.
using StepObserver = std::function<void(const SolutionState&, const TraceRecord&)>;

// Steps from u₀ until sup u ≥ 1 - τ_q, t ≥ t_max, or (if enabled) a steady
// state is reached. Records a trace row per step and snapshots on the gap schedule.
RunResult run_to_quench(const ProblemParams& p, std::size_t M, const StepControl& ctl,
                        const StepObserver& observer = {});

// Same, starting from an explicit state (used for lockstep comparisons).
RunResult run_from_state(const ProblemParams& p, SolutionState initial, const StepControl& ctl,
                         const StepObserver& observer = {});

TraceRecord make_trace_record(std::size_t step, const SolutionState& s, double dt, double running_min);

std::string to_string(StopReason reason);

}  // namespace quench
