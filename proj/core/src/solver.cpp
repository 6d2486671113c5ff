#include "quench/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "quench/error.hpp"

namespace quench {

namespace {

double source_term(double lambda, double A, double u) {
  const double gap = 1.0 - u;
  return lambda * A / (gap * gap);
}

}  // namespace

NonlocalFactor nonlocal_factor(const RadialField& u, double chi) {
  RadialField inv(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u[i] < 1.0)) throw TouchdownError(fmt::format("touched down: u = {} at r = {}", u[i], u.grid().node(i)));
    inv[i] = 1.0 / (1.0 - u[i]);
  }
  NonlocalFactor f;
  f.I = ball_integral(inv);
  const double base = 1.0 + chi * f.I;
  f.A = 1.0 / (base * base);
  return f;
}

SolutionState make_initial_state(const ProblemParams& p, const RadialGrid& grid) {
  check_params(p);
  if (grid.dimension() != p.n || grid.radius() != p.R) throw InvalidArgument("grid does not match problem (n, R)");
  SolutionState s{0.0, RadialField::from_function(grid, [&](double r) { return p.initial.value(r, p.R); }), 1.0, 0.0};
  s.u[grid.size() - 1] = 0.0;
  const NonlocalFactor f = nonlocal_factor(s.u, p.chi);
  s.A = f.A;
  s.I = f.I;
  return s;
}

void check_control(const StepControl& ctl) {
  if (!(ctl.safety > 0.0 && ctl.safety <= 1.0)) throw InvalidArgument(fmt::format("safety must be in (0, 1], got {}", ctl.safety));
  if (!(ctl.dt_max > 0.0)) throw InvalidArgument(fmt::format("dt_max must be > 0, got {}", ctl.dt_max));
  if (!(ctl.quench_tol > 0.0 && ctl.quench_tol < 1.0)) {
    throw InvalidArgument(fmt::format("quench_tol must be in (0, 1), got {}", ctl.quench_tol));
  }
  if (!(ctl.t_max > 0.0)) throw InvalidArgument(fmt::format("t_max must be > 0, got {}", ctl.t_max));
  if (!(ctl.steady_tol >= 0.0)) throw InvalidArgument("steady_tol must be >= 0");
  if (ctl.residual_interval == 0) throw InvalidArgument("residual_interval must be >= 1");
  if (ctl.trace_stride == 0) throw InvalidArgument("trace_stride must be >= 1");
  for (double g : ctl.snapshot_gaps) {
    if (!(g > 0.0 && g < 1.0)) throw InvalidArgument(fmt::format("snapshot gap {} not in (0, 1)", g));
  }
}

RadialField rhs_eval(const SolutionState& s, const ProblemParams& p) {
  RadialField out = radial_laplacian_apply(s.u);
  const std::size_t last = s.u.size() - 1;
  for (std::size_t i = 0; i < last; ++i) {
    if (!(s.u[i] < 1.0)) throw TouchdownError(fmt::format("touched down at r = {}", s.u.grid().node(i)));
    out[i] += source_term(p.lambda, s.A, s.u[i]);
  }
  out[last] = 0.0;
  return out;
}

double steady_residual(const SolutionState& s, const ProblemParams& p) {
  const RadialField f = rhs_eval(s, p);
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

StepSize choose_dt(const SolutionState& s, const StepControl& ctl, double lambda) {
  const RadialGrid& g = s.u.grid();
  const double h = g.spacing();
  StepSize out;
  out.diffusion_cap = ctl.safety * h * h / (2.0 * static_cast<double>(g.dimension()));
  const double gap = 1.0 - s.u.max();
  out.source_cap = lambda > 0.0 ? ctl.safety * gap * gap * gap / (2.0 * lambda * s.A)
                                : std::numeric_limits<double>::infinity();
  out.dt = std::min({ctl.dt_max, out.diffusion_cap, out.source_cap});
  return out;
}

ImexIntegrator::ImexIntegrator(const ProblemParams& p, const RadialGrid& grid)
    : params_(p), grid_(grid), stencil_(radial_laplacian_stencil(grid)), weights_(grid.size()) {
  const std::size_t M = grid.size();
  const double scale = unit_sphere_area(grid.dimension()) * grid.spacing();
  for (std::size_t i = 0; i < M; ++i) {
    const double trap = (i == 0 || i + 1 == M) ? 0.5 : 1.0;
    weights_[i] = scale * trap * std::pow(grid.node(i), grid.dimension() - 1);
  }
  const std::size_t m = M - 1;
  lower_.resize(m);
  multiplier_.resize(m);
  inv_pivot_.resize(m);
  rhs_.resize(m);
  next_.resize(M);
}

void ImexIntegrator::factor(double dt) {
  if (dt == factor_dt_) return;
  const std::size_t m = grid_.size() - 1;
  const auto& L = stencil_;
  auto alpha = [&](std::size_t i) { return i == 0 ? 0.0 : L.lower[i]; };

  // Rows of the difference system: lower d_{i-1} + diag d_i + upper d_{i+1}.
  // Strictly diagonally dominant with nonpositive off-diagonals, so the
  // elimination needs no pivoting and keeps every pivot positive.
  double prev_multiplier = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const bool last = i + 1 == m;
    const double lower = -dt * alpha(i);
    const double diag = last ? 1.0 + dt * L.upper[i] : 1.0 + dt * (L.upper[i] + alpha(i + 1));
    const double upper = last ? 0.0 : -dt * L.upper[i + 1];
    const double pivot = diag - lower * prev_multiplier;
    if (!(pivot > 0.0)) throw SolverError(fmt::format("nonpositive pivot {} in row {}", pivot, i));
    lower_[i] = lower;
    inv_pivot_[i] = 1.0 / pivot;
    multiplier_[i] = upper * inv_pivot_[i];
    prev_multiplier = multiplier_[i];
  }
  factor_dt_ = dt;
}

NonlocalFactor ImexIntegrator::nonlocal(std::span<const double> u) const {
  NonlocalFactor f;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u[i] < 1.0)) throw TouchdownError(fmt::format("touched down: u = {} at r = {}", u[i], grid_.node(i)));
    f.I += weights_[i] / (1.0 - u[i]);
  }
  const double base = 1.0 + params_.chi * f.I;
  f.A = 1.0 / (base * base);
  return f;
}

StepStatus ImexIntegrator::advance(SolutionState& s, double dt, double quench_tol) {
  if (dt == 0.0) return StepStatus::accepted;
  if (!(dt > 0.0)) throw InvalidArgument(fmt::format("dt must be >= 0, got {}", dt));

  const std::size_t M = grid_.size();
  const std::size_t m = M - 1;  // unknowns d_0 .. d_{M-2}
  const std::span<const double> u = s.u.values();

  // The system (Id - dt Δ_h) u = b is solved for the differences
  // d_i = u_i - u_{i+1}, using (Δ_h u)_i = α_i d_{i-1} - γ_i d_i. Subtracting
  // consecutive rows gives another tridiagonal M-matrix (n ≤ 3), so d keeps
  // its sign exactly in floating point and u = suffix sums of d is monotone
  // whenever u_old is. The Dirichlet row closes the last difference.
  factor(dt);

  const double lamA = params_.lambda * s.A;
  double inv_g1 = 1.0 / (1.0 - u[0]);
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const double inv_g0 = inv_g1;
    inv_g1 = 1.0 / (1.0 - u[i + 1]);
    // S_i - S_{i+1} written through d_i so its sign follows d_i.
    const double d = u[i] - u[i + 1];
    const double jump = lamA * d * ((1.0 - u[i]) + (1.0 - u[i + 1])) * (inv_g0 * inv_g0) * (inv_g1 * inv_g1);
    rhs_[i] = d + dt * jump;
  }
  rhs_[m - 1] = u[m - 1] + dt * source_term(params_.lambda, s.A, u[m - 1]);

  for (std::size_t i = 0; i < m; ++i) {
    const double carried = i == 0 ? 0.0 : lower_[i] * rhs_[i - 1];
    rhs_[i] = (rhs_[i] - carried) * inv_pivot_[i];
  }
  for (std::size_t i = m - 1; i-- > 0;) rhs_[i] -= multiplier_[i] * rhs_[i + 1];

  next_[M - 1] = 0.0;
  for (std::size_t i = m; i-- > 0;) next_[i] = next_[i + 1] + rhs_[i];

  const double limit = 1.0 - quench_tol / 10.0;
  for (double v : next_) {
    if (!std::isfinite(v)) throw SolverError("non-finite value after linear solve");
    if (v >= limit) return StepStatus::overshoot;
  }

  const NonlocalFactor f = nonlocal(next_);
  std::copy(next_.begin(), next_.end(), s.u.values().begin());
  s.time += dt;
  s.A = f.A;
  s.I = f.I;
  return StepStatus::accepted;
}

StepResult step_imex(const SolutionState& s, double dt, const ProblemParams& p, double quench_tol) {
  ImexIntegrator integrator(p, s.u.grid());
  StepResult out{StepStatus::accepted, s};
  out.status = integrator.advance(out.state, dt, quench_tol);
  return out;
}

std::optional<QuenchPoint> detect_quench(const SolutionState& s, double quench_tol) {
  const std::size_t i = s.u.argmax();
  if (s.u[i] < 1.0 - quench_tol) return std::nullopt;
  return QuenchPoint{i, s.u.grid().node(i), s.u[i]};
}

TraceRecord make_trace_record(std::size_t step, const SolutionState& s, double dt, double running_min) {
  TraceRecord r;
  r.step = step;
  r.t = s.time;
  r.dt = dt;
  r.sup_u = s.u.max();
  r.gap = 1.0 - r.sup_u;
  r.A = s.A;
  r.I = s.I;
  r.boundary_flux = -boundary_derivative(s.u);
  r.A_running_min = std::min(running_min, s.A);
  return r;
}

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::quenched: return "quenched";
    case StopReason::time_limit: return "time_limit";
    case StopReason::steady: return "steady";
  }
  return "unknown";
}

RunResult run_to_quench(const ProblemParams& p, std::size_t M, const StepControl& ctl, const StepObserver& observer) {
  check_params(p);
  const RadialGrid grid(p.n, p.R, M);
  return run_from_state(p, make_initial_state(p, grid), ctl, observer);
}

RunResult run_from_state(const ProblemParams& p, SolutionState initial, const StepControl& ctl,
                         const StepObserver& observer) {
  check_params(p);
  check_control(ctl);

  std::vector<double> gaps = ctl.snapshot_gaps;
  std::sort(gaps.begin(), gaps.end(), std::greater<>());

  QuenchReport rep;
  std::vector<TraceRecord> trace;
  SolutionState state = std::move(initial);

  TraceRecord rec = make_trace_record(0, state, 0.0, state.A);
  trace.push_back(rec);
  rep.max_I = state.I;
  if (observer) observer(state, rec);

  rep.snapshots.push_back({state.time, std::nullopt, state.u});
  std::size_t next_gap = 0;
  while (next_gap < gaps.size() && rec.gap <= gaps[next_gap]) ++next_gap;

  ImexIntegrator integrator(p, state.u.grid());
  std::size_t step = 0;
  auto finish_quench = [&](const QuenchPoint& q, double t_prev) {
    rep.quenched = true;
    rep.reason = StopReason::quenched;
    rep.T_lo = t_prev;
    rep.T_hi = state.time;
    rep.quench_radius = q.radius;
    rep.quench_index = q.index;
  };

  if (auto q = detect_quench(state, ctl.quench_tol)) {
    finish_quench(*q, state.time);
  } else {
    for (;;) {
      if (state.time >= ctl.t_max) {
        rep.reason = StopReason::time_limit;
        break;
      }
      const StepSize size = choose_dt(state, ctl, p.lambda);
      double dt = std::min(size.dt, ctl.t_max - state.time);

      const double t_prev = state.time;
      for (int k = 0; integrator.advance(state, dt, ctl.quench_tol) == StepStatus::overshoot; ++k) {
        if (k == ctl.max_bisections) {
          throw SolverError(fmt::format("step rejected {} times at t = {} (sup u = {})", k, state.time, state.u.max()));
        }
        dt *= 0.5;
      }
      ++step;

      rec = make_trace_record(step, state, dt, rec.A_running_min);
      rec.diffusion_cap = size.diffusion_cap;
      rec.source_cap = size.source_cap;
      if (step % ctl.trace_stride == 0) trace.push_back(rec);
      rep.max_I = std::max(rep.max_I, state.I);
      if (observer) observer(state, rec);

      if (next_gap < gaps.size() && rec.gap <= gaps[next_gap]) {
        while (next_gap < gaps.size() && rec.gap <= gaps[next_gap]) ++next_gap;
        rep.snapshots.push_back({state.time, gaps[next_gap - 1], state.u});
      }

      if (auto q = detect_quench(state, ctl.quench_tol)) {
        finish_quench(*q, t_prev);
        break;
      }
      if (ctl.steady_tol > 0.0 && step % ctl.residual_interval == 0 && steady_residual(state, p) < ctl.steady_tol) {
        rep.reason = StopReason::steady;
        break;
      }
    }
  }

  if (!rep.quenched) {
    rep.quench_index = state.u.argmax();
    rep.quench_radius = state.u.grid().node(rep.quench_index);
    rep.steady_residual = steady_residual(state, p);
  }
  if (trace.back().step != rec.step) trace.push_back(rec);
  rep.delta1_hat = rec.A_running_min;
  rep.steps = step;
  return RunResult{std::move(rep), std::move(trace), std::move(state)};
}

}  // namespace quench
