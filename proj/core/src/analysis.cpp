#include "quench/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "quench/error.hpp"

namespace quench {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Relative slack for the A ceiling: the quadrature of 1/(1 - u) can land a
// few ulps below the exact ball volume.
constexpr double kCeilingSlack = 1e-14;

bool in_window(double r, Window w) { return r >= w.lo && r <= w.hi; }

void require_same_problem(const ProblemParams& a, const ProblemParams& b) {
  if (a.n != b.n || a.R != b.R || a.lambda != b.lambda || a.chi != b.chi) {
    throw InvalidArgument("comparison runs must share (n, R, lambda, chi)");
  }
}

}  // namespace

Window default_profile_window(const RadialGrid& grid) { return {2.0 * grid.spacing(), 0.5 * grid.radius()}; }

double profile_tolerance(const RadialField& v) {
  const double h = v.grid().spacing();
  return 5.0 * h * h * max_abs_second_difference(v);
}

RadialField gap_field(const RadialField& u) {
  RadialField v(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) v[i] = 1.0 - u[i];
  return v;
}

ProfileCheck check_profile_lower_bound(const RadialField& v, double exponent, double C, std::optional<Window> window) {
  const Window w = window.value_or(default_profile_window(v.grid()));
  ProfileCheck out;
  out.margin = kInf;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double r = v.grid().node(i);
    if (in_window(r, w)) out.margin = std::min(out.margin, v[i] - C * std::pow(r, exponent));
  }
  out.tolerance = profile_tolerance(v);
  out.pass = out.margin >= -out.tolerance;
  return out;
}

double min_ratio(const RadialField& v, double exponent, Window window) {
  double m = kInf;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double r = v.grid().node(i);
    if (r > 0.0 && in_window(r, window)) m = std::min(m, v[i] / std::pow(r, exponent));
  }
  return m;
}

ProfileFit fit_profile_exponent(const RadialField& v, Window window) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double r = v.grid().node(i);
    if (!(r > 0.0 && in_window(r, window))) continue;
    if (!(v[i] > 0.0)) throw InvalidArgument(fmt::format("v = {} is not positive at r = {}", v[i], r));
    const double x = std::log(r);
    const double y = std::log(v[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++k;
  }
  if (k < 8) throw InvalidArgument(fmt::format("window too narrow: {} nodes in [{}, {}]", k, window.lo, window.hi));
  const double dk = static_cast<double>(k);
  const double slope = (dk * sxy - sx * sy) / (dk * sxx - sx * sx);
  ProfileFit fit;
  fit.window = window;
  fit.exponent = slope;
  fit.coefficient = std::exp((sy - slope * sx) / dk);
  fit.nodes = k;
  return fit;
}

TransformDiagnostic check_qtilde_nonneg(std::span<const Snapshot> snapshots, double beta, double epsilon) {
  TransformDiagnostic d;
  d.beta = beta;
  d.epsilon = epsilon;
  d.qtilde_min = kInf;
  d.profile_margin = kInf;
  d.profile_slack = kInf;
  const double C = std::pow(0.5 * epsilon, 1.0 / beta);
  const double p = 2.0 / beta;
  for (const Snapshot& s : snapshots) {
    const RadialGrid& grid = s.u.grid();
    const int n = grid.dimension();
    const RadialField v = gap_field(s.u);
    RadialField w(grid);
    for (std::size_t i = 0; i < v.size(); ++i) w[i] = std::pow(v[i], beta);
    RadialField wr = radial_derivative(w);
    // w is even in r: the centered difference with the mirrored ghost node
    // gives w_r(0) = 0, where a one-sided closure would not.
    wr[0] = 0.0;

    double margin = kInf;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double r = grid.node(i);
      const double q = std::pow(r, n - 1) * wr[i];
      d.q_abs_max = std::max(d.q_abs_max, std::abs(q));
      d.qtilde_min = std::min(d.qtilde_min, q - epsilon * std::pow(r, n));
      margin = std::min(margin, v[i] - C * std::pow(r, p));
    }
    d.profile_margin = std::min(d.profile_margin, margin);
    const double tol = profile_tolerance(v);
    if (margin + tol < d.profile_slack) {
      d.profile_slack = margin + tol;
      d.profile_tolerance = tol;
    }
    ++d.snapshots;
  }
  return d;
}

std::optional<double> estimate_c2(std::span<const TraceRecord> trace, double R) {
  if (trace.empty()) return std::nullopt;
  double m = kInf;
  for (const TraceRecord& r : trace) m = std::min(m, r.boundary_flux);
  const double c2 = m / R;
  if (!(c2 > 0.0)) return std::nullopt;
  return c2;
}

ComparisonResult check_comparison(const ProblemParams& p1, const ProblemParams& p2, std::size_t M,
                                  const StepControl& ctl, const StepObserver& observe1,
                                  const StepObserver& observe2) {
  check_params(p1);
  check_params(p2);
  require_same_problem(p1, p2);
  check_control(ctl);

  const RadialGrid grid(p1.n, p1.R, M);
  SolutionState s1 = make_initial_state(p1, grid);
  SolutionState s2 = make_initial_state(p2, grid);
  ImexIntegrator i1(p1, grid);
  ImexIntegrator i2(p2, grid);

  ComparisonResult out;
  out.tolerance = kComparisonTolerance;
  double min1 = s1.A;
  double min2 = s2.A;
  auto record = [&](std::size_t step, double dt) {
    for (std::size_t i = 0; i < M; ++i) out.max_violation = std::max(out.max_violation, s1.u[i] - s2.u[i]);
    const TraceRecord r1 = make_trace_record(step, s1, dt, min1);
    const TraceRecord r2 = make_trace_record(step, s2, dt, min2);
    min1 = r1.A_running_min;
    min2 = r2.A_running_min;
    if (observe1) observe1(s1, r1);
    if (observe2) observe2(s2, r2);
  };
  record(0, 0.0);

  while (s1.time < ctl.t_max && !detect_quench(s1, ctl.quench_tol) && !detect_quench(s2, ctl.quench_tol)) {
    double dt = std::min({choose_dt(s1, ctl, p1.lambda).dt, choose_dt(s2, ctl, p2.lambda).dt, ctl.t_max - s1.time});
    SolutionState next1 = s1;
    SolutionState next2 = s2;
    for (int k = 0;; ++k) {
      const bool ok1 = i1.advance(next1, dt, ctl.quench_tol) == StepStatus::accepted;
      const bool ok2 = ok1 && i2.advance(next2, dt, ctl.quench_tol) == StepStatus::accepted;
      if (ok2) break;
      if (k == ctl.max_bisections) throw SolverError(fmt::format("lockstep rejected {} times at t = {}", k, s1.time));
      next1 = s1;
      next2 = s2;
      dt *= 0.5;
    }
    s1 = std::move(next1);
    s2 = std::move(next2);
    ++out.steps;
    record(out.steps, dt);
  }
  out.t_end = s1.time;
  return out;
}

std::optional<SupersolutionCheck> check_supersolution(const RunResult& run, const ProblemParams& p, double delta1) {
  if (!quench_time_upper_bound(p.lambda, delta1, p.n, p.R)) return std::nullopt;
  const double c0 = c0_of(p.lambda, delta1, p.n, p.R);
  const double t_end = 1.0 / (p.lambda * delta1 * c0);

  SupersolutionCheck out;
  out.margin = kInf;
  for (const Snapshot& s : run.report.snapshots) {
    if (!(s.t < t_end)) continue;
    const RadialField v = gap_field(s.u);
    double violation = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double psi = supersolution_psi(v.grid().node(i), s.t, p.lambda, delta1, c0, p.R);
      violation = std::max(violation, v[i] - psi);
    }
    const double tol = profile_tolerance(v);
    out.max_violation = std::max(out.max_violation, violation);
    if (tol - violation < out.margin) {
      out.margin = tol - violation;
      out.tolerance = tol;
    }
    ++out.snapshots_used;
  }
  out.pass = out.snapshots_used > 0 && out.margin >= 0.0;
  return out;
}

QuenchBoundCheck verify_quench_time_bound(const QuenchReport& report, const ProblemParams& p) {
  return verify_quench_time_bound(report, p, report.delta1_hat);
}

QuenchBoundCheck verify_quench_time_bound(const QuenchReport& report, const ProblemParams& p, double delta1) {
  QuenchBoundCheck c;
  c.delta1 = delta1;
  c.T_hi = report.T_hi;
  if (!report.quenched) {
    c.reason = "run did not quench";
    return c;
  }
  if (report.delta1_hat < delta1) {
    c.reason = fmt::format("observed min A = {} is below delta1 = {}", report.delta1_hat, delta1);
    return c;
  }
  const auto bound = quench_time_upper_bound(p.lambda, delta1, p.n, p.R);
  if (!bound) {
    c.reason = fmt::format("lambda * delta1 * R^2 = {} does not exceed 2n = {}", p.lambda * delta1 * p.R * p.R, 2 * p.n);
    return c;
  }
  c.applicable = true;
  c.bound = *bound;
  c.pass = report.T_hi <= *bound * (1.0 + kQuenchBoundSlack);
  return c;
}

PrefixBoundCheck verify_prefix_bounds(std::span<const TraceRecord> trace, const ProblemParams& p) {
  PrefixBoundCheck out;
  for (const TraceRecord& r : trace) {
    const auto bound = quench_time_upper_bound(p.lambda, r.A_running_min, p.n, p.R);
    if (!bound) continue;
    ++out.rows_applicable;
    out.last_applicable_t = r.t;
    out.worst_ratio = std::max(out.worst_ratio, r.t / *bound);
  }
  out.pass = out.worst_ratio <= 1.0 + kQuenchBoundSlack;
  return out;
}

IntegralCheck check_integral_bounded(const RunResult& run, int n) {
  IntegralCheck out;
  out.max_I = run.report.max_I;
  out.applicable = n >= 3;
  const auto& snaps = run.report.snapshots;
  if (snaps.empty()) {
    out.pass = std::isfinite(out.max_I);
    return out;
  }
  const Snapshot& ref = snaps.size() >= 2 ? snaps[snaps.size() - 2] : snaps.front();
  RadialField inv(ref.u.grid());
  for (std::size_t i = 0; i < inv.size(); ++i) inv[i] = 1.0 / (1.0 - ref.u[i]);
  const double ref_I = ball_integral(inv);
  out.growth = out.max_I / ref_I - 1.0;
  out.pass = std::isfinite(out.max_I) && out.growth < 0.1;
  return out;
}

ConvergenceStudy convergence_study(const ProblemParams& p, std::span<const std::size_t> M_list, const StepControl& ctl) {
  if (M_list.size() < 3) throw InvalidArgument("convergence study needs at least 3 grid sizes");
  for (std::size_t k = 1; k < M_list.size(); ++k) {
    if (!(M_list[k] > M_list[k - 1])) throw InvalidArgument("grid sizes must increase strictly");
  }
  ConvergenceStudy study;
  for (std::size_t M : M_list) {
    const RunResult run = run_to_quench(p, M, ctl);
    if (!run.report.quenched) throw SolverError(fmt::format("run with M = {} did not quench by t = {}", M, ctl.t_max));
    study.rows.push_back({M, p.R / static_cast<double>(M - 1), run.report.T_hi, run.report.quench_radius});
  }
  const std::size_t k = study.rows.size();
  const double d1 = std::abs(study.rows[k - 3].T_hi - study.rows[k - 2].T_hi);
  const double d2 = std::abs(study.rows[k - 2].T_hi - study.rows[k - 1].T_hi);
  if (d1 == 0.0 || d2 == 0.0) throw InvalidArgument("successive differences vanish; order undefined");
  study.order = std::log2(d1 / d2);
  return study;
}

InvariantMonitor::InvariantMonitor(const ProblemParams& p, bool expect_monotone, double monotone_tol)
    : a_ceiling_(1.0 / ((1.0 + p.chi * ball_volume(p.n, p.R)) * (1.0 + p.chi * ball_volume(p.n, p.R)))),
      expect_monotone_(expect_monotone),
      monotone_tol_(monotone_tol) {}

void InvariantMonitor::observe(const SolutionState& s, const TraceRecord&) {
  ++states_seen;
  const auto u = s.u.values();
  bool negative = false;
  bool touched = false;
  for (double x : u) {
    negative = negative || x < 0.0;
    touched = touched || !(x < 1.0);
  }
  if (negative) ++positivity_violations;
  if (touched) ++gap_violations;
  if (u.back() != 0.0) ++boundary_violations;
  if (expect_monotone_) {
    double excess = 0.0;
    for (std::size_t i = 1; i < u.size(); ++i) excess = std::max(excess, u[i] - u[i - 1]);
    worst_monotone_excess = std::max(worst_monotone_excess, excess);
    if (excess > monotone_tol_) ++monotone_violations;
  }
  if (s.A > a_ceiling_ * (1.0 + kCeilingSlack)) ++a_bound_violations;
  max_sup_u = std::max(max_sup_u, s.u.max());
}

StepObserver InvariantMonitor::observer() {
  return [this](const SolutionState& s, const TraceRecord& r) { observe(s, r); };
}

bool InvariantMonitor::ok() const {
  return states_seen > 0 && positivity_violations == 0 && boundary_violations == 0 && monotone_violations == 0 &&
         a_bound_violations == 0 && gap_violations == 0;
}

std::string InvariantMonitor::summary() const {
  return fmt::format(
      "states={} positivity={} boundary={} monotone={} (worst {:.3g}) A_ceiling={} touchdown={}", states_seen,
      positivity_violations, boundary_violations, monotone_violations, worst_monotone_excess, a_bound_violations,
      gap_violations);
}

ConstantChain build_constant_chain(const ProblemParams& p, double beta, std::span<const TraceRecord> pilot_trace,
                                   double lambda) {
  const InitialDataCheck chk = validate_initial_data(p, Hypothesis::theorem9);
  if (!chk.ok()) throw InvalidArgument(fmt::format("initial data: {}", chk.violations.front()));
  const auto c2 = estimate_c2(pilot_trace, p.R);
  if (!c2) throw InvalidArgument("boundary flux lower bound not observed in the pilot run (c2 <= 0)");

  ConstantChain chain;
  chain.c1 = *chk.c1;
  chain.c2 = *c2;
  chain.A0 = pilot_trace.front().A;
  const ConstantChainInput in{p.n, p.R, p.chi, beta, p.initial.a, chain.c1, chain.c2, chain.A0};
  const auto bounds = select_constants(in, lambda);
  if (!bounds) throw InvalidArgument("no admissible epsilon: A(0) > delta1 fails for every halving");
  chain.bounds = *bounds;
  return chain;
}

}  // namespace quench
