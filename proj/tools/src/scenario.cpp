#include "quench/app/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <thread>

#include <fmt/format.h>

#include "json.hpp"
#include "quench/analysis.hpp"
#include "quench/io.hpp"

namespace quench::app {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr double kMonotoneTolerance = 1e-12;
constexpr double kOrderThreshold = 1.5;
constexpr double kProfileVariation = 0.5;
constexpr double kExponentCeiling = 2.2;
constexpr double kProfileOnsetGap = 0.5;

// Everything one evaluation of a scenario produces, before anything is written.
struct Evaluation {
  std::vector<Check> checks;
  std::vector<std::pair<std::string, std::string>> facts;
  std::map<std::string, std::string> files;  // file name -> contents
  json details = json::object();
};

std::string num(double x) { return io::format_double(x); }

Check make_check(std::string name, bool applicable, bool pass, double margin, double tolerance, std::string ref,
                 std::string detail = {}) {
  // + 0.0 folds -0 into 0 for the report.
  return Check{std::move(name), applicable, applicable && pass, applicable ? margin + 0.0 : 0.0,
               applicable ? tolerance : 0.0, std::move(ref), std::move(detail)};
}

bool monotone_data(const ProblemParams& p) {
  if (p.initial.kind != InitialKind::sampled) return true;
  const auto chk = validate_initial_data(p, Hypothesis::theorem8);
  return std::find(chk.violations.begin(), chk.violations.end(), "not monotone decreasing") == chk.violations.end();
}

void require_hypotheses(const ProblemParams& p, Hypothesis h) {
  const InitialDataCheck chk = validate_initial_data(p, h);
  if (!chk.ok()) {
    throw ConfigError(fmt::format("initial data violates the {} hypotheses: {}", to_string(h), chk.violations.front()));
  }
}

struct MonitoredRun {
  RunResult run;
  InvariantMonitor monitor;
};

MonitoredRun monitored_run(const ProblemParams& p, std::size_t M, const StepControl& ctl) {
  InvariantMonitor mon(p, monotone_data(p), kMonotoneTolerance);
  RunResult run = run_to_quench(p, M, ctl, mon.observer());
  return {std::move(run), std::move(mon)};
}

Check invariant_check(std::string name, const InvariantMonitor& mon) {
  return make_check(std::move(name), true, mon.ok(), kMonotoneTolerance - mon.worst_monotone_excess,
                    kMonotoneTolerance, "positivity, boundary value, monotone profile, A ceiling", mon.summary());
}

json run_json(const QuenchReport& r, const std::string& prefix) {
  json snaps = json::array();
  for (std::size_t k = 0; k < r.snapshots.size(); ++k) {
    const Snapshot& s = r.snapshots[k];
    snaps.push_back({{"t", s.t},
                     {"gap_threshold", s.gap_threshold ? json(*s.gap_threshold) : json(nullptr)},
                     {"gap", 1.0 - s.u.max()},
                     {"file", fmt::format("{}snapshot_{:03d}.csv", prefix, k)}});
  }
  return {{"quenched", r.quenched},
          {"stop_reason", to_string(r.reason)},
          {"T_lo", r.T_lo},
          {"T_hi", r.T_hi},
          {"quench_radius", r.quench_radius},
          {"quench_index", r.quench_index},
          {"delta1_hat", r.delta1_hat},
          {"max_I", r.max_I},
          {"steady_residual", r.steady_residual},
          {"steps", r.steps},
          {"snapshots", snaps}};
}

void add_run_files(Evaluation& ev, const RunResult& run, const std::string& prefix) {
  ev.files[prefix + "trace.csv"] = io::trace_csv(run.trace);
  for (std::size_t k = 0; k < run.report.snapshots.size(); ++k) {
    ev.files[fmt::format("{}snapshot_{:03d}.csv", prefix, k)] = io::snapshot_csv(run.report.snapshots[k].u);
  }
}

void add_run_facts(Evaluation& ev, const RunResult& run, const std::string& bound = {}) {
  const QuenchReport& r = run.report;
  if (r.quenched) {
    std::string line = fmt::format("T ∈ [{}, {}] at r = {}", num(r.T_lo), num(r.T_hi), num(r.quench_radius));
    if (!bound.empty()) line += ", bound = " + bound;
    ev.facts.emplace_back("quench", line);
  } else {
    ev.facts.emplace_back("quench", fmt::format("no quench up to t = {} ({}), steady residual {}",
                                                num(run.final_state.time), to_string(r.reason), num(r.steady_residual)));
  }
  ev.facts.emplace_back("min A", num(r.delta1_hat));
  ev.facts.emplace_back("steps", std::to_string(r.steps));
}

Check bound_check(const QuenchBoundCheck& qb, const std::string& what) {
  return make_check("quench_time_bound", qb.applicable, qb.pass,
                    qb.bound * (1.0 + kQuenchBoundSlack) - qb.T_hi, kQuenchBoundSlack * qb.bound,
                    "lemma7: T <= 1/(lambda delta1 c0), c0 = 1 - 2n/(lambda delta1 R^2)",
                    qb.applicable ? fmt::format("delta1 = {} ({}), bound = {}", num(qb.delta1), what, num(qb.bound))
                                  : qb.reason);
}

Evaluation evaluate_lemma7(const RunConfig& cfg) {
  const ProblemParams& p = cfg.problem;
  require_hypotheses(p, Hypothesis::lemma7);
  Evaluation ev;
  const MonitoredRun mr = monitored_run(p, cfg.M, cfg.control);
  const RunResult& run = mr.run;
  const QuenchBoundCheck qb = verify_quench_time_bound(run.report, p);
  add_run_files(ev, run, "");
  add_run_facts(ev, run, qb.applicable ? num(qb.bound) : "not applicable");
  ev.details["run"] = run_json(run.report, "");

  ev.checks.push_back(invariant_check("invariants", mr.monitor));
  ev.checks.push_back(bound_check(qb, "observed min A"));

  const auto ss = check_supersolution(run, p, run.report.delta1_hat);
  ev.checks.push_back(make_check("supersolution", ss.has_value(), ss && ss->pass, ss ? ss->margin : 0.0,
                                 ss ? ss->tolerance : 0.0, "lemma7: 0 < v <= psi",
                                 ss ? fmt::format("max (v - psi)+ = {} over {} snapshots", num(ss->max_violation),
                                                  ss->snapshots_used)
                                    : "lambda * min A * R^2 does not exceed 2n"));

  const PrefixBoundCheck pre = verify_prefix_bounds(run.trace, p);
  ev.checks.push_back(make_check("prefix_quench_time_bound", pre.rows_applicable > 0, pre.pass,
                                 1.0 + kQuenchBoundSlack - pre.worst_ratio, kQuenchBoundSlack,
                                 "lemma7 applied to [0, t] with delta1 = min A on [0, t]",
                                 fmt::format("{} trace rows applicable, last at t = {}, worst t/bound = {}",
                                             pre.rows_applicable, num(pre.last_applicable_t), num(pre.worst_ratio))));
  return ev;
}

Evaluation evaluate_theorem8(const RunConfig& cfg) {
  const ProblemParams& p = cfg.problem;
  require_hypotheses(p, Hypothesis::theorem8);
  Evaluation ev;
  const MonitoredRun mr = monitored_run(p, cfg.M, cfg.control);
  const RunResult& run = mr.run;
  const QuenchReport& rep = run.report;
  add_run_files(ev, run, "");
  add_run_facts(ev, run);
  ev.details["run"] = run_json(rep, "");

  const RadialGrid& grid = run.final_state.u.grid();
  const double h = grid.spacing();
  ev.checks.push_back(invariant_check("invariants", mr.monitor));
  ev.checks.push_back(make_check("quenched", true, rep.quenched, rep.quenched ? 0.0 : -1.0, 0.0,
                                 "theorem8: finite quenching time", to_string(rep.reason)));
  ev.checks.push_back(make_check("quench_radius", rep.quenched, rep.quench_radius <= 2.0 * h,
                                 2.0 * h - rep.quench_radius, 2.0 * h, "theorem8: the origin is the only quenching point",
                                 fmt::format("radius {} vs 2h = {}", num(rep.quench_radius), num(2.0 * h))));

  std::size_t off_origin = 0;
  for (const Snapshot& s : rep.snapshots) off_origin += s.u.argmax() != 0;
  ev.checks.push_back(make_check("argmax_at_origin", true, off_origin == 0, -static_cast<double>(off_origin), 0.0,
                                 "theorem8: the origin is the only quenching point",
                                 fmt::format("{} of {} snapshots peak away from r = 0", off_origin, rep.snapshots.size())));

  // The lower bound holds from some t0 on; it is tested from the first
  // snapshot with gap <= 0.5.
  const Window window{2.0 * h, 0.25 * p.R};
  std::vector<double> ratios;
  json ratio_rows = json::array();
  for (const Snapshot& s : rep.snapshots) {
    if (1.0 - s.u.max() > kProfileOnsetGap) continue;
    ratios.push_back(min_ratio(gap_field(s.u), 2.0, window));
    ratio_rows.push_back({{"t", s.t}, {"min_ratio", ratios.back()}});
  }
  ev.details["profile_min_ratio"] = ratio_rows;
  const bool enough = ratios.size() >= 3;
  double variation = 0.0;
  bool positive = true;
  if (enough) {
    const auto last = std::span<const double>(ratios).last(3);
    const auto [lo, hi] = std::minmax_element(last.begin(), last.end());
    variation = (*hi - *lo) / *hi;
    positive = *lo > 0.0;
  }
  ev.checks.push_back(make_check("profile_quadratic_lower_bound", enough, positive && variation < kProfileVariation,
                                 kProfileVariation - variation, kProfileVariation,
                                 "theorem8: 1 - u >= C r^2 near the origin",
                                 enough ? fmt::format("empirical C = {} (last snapshot), variation {} over the last three",
                                                      num(ratios.back()), num(variation))
                                        : "fewer than three snapshots with gap <= 0.5"));
  if (enough) ev.facts.emplace_back("empirical C", num(ratios.back()));

  const ProfileFit fit = fit_profile_exponent(gap_field(rep.snapshots.back().u), window);
  ev.checks.push_back(make_check("profile_exponent", rep.quenched, fit.exponent <= kExponentCeiling,
                                 kExponentCeiling - fit.exponent, kExponentCeiling - 2.0,
                                 "theorem8: 1 - u >= C r^2 near the origin",
                                 fmt::format("fitted exponent {} on the final snapshot", num(fit.exponent))));

  const IntegralCheck ic = check_integral_bounded(run, p.n);
  ev.checks.push_back(make_check("integral_bounded", ic.applicable, ic.pass, 0.1 - ic.growth, 0.1,
                                 "theorem8: sup of the integral of 1/(1 - u) is finite for n >= 3",
                                 fmt::format("max I = {}, growth after the second-to-last snapshot {}", num(ic.max_I),
                                             num(ic.growth))));
  return ev;
}

Evaluation evaluate_theorem9(const RunConfig& cfg) {
  const ProblemParams& p = cfg.problem;
  require_hypotheses(p, Hypothesis::theorem9);
  Evaluation ev;
  const MonitoredRun pilot = monitored_run(p, cfg.M, cfg.control);
  ev.files["pilot_trace.csv"] = io::trace_csv(pilot.run.trace);
  ev.checks.push_back(invariant_check("pilot_invariants", pilot.monitor));

  ConstantChain chain;
  try {
    chain = build_constant_chain(p, cfg.beta, pilot.run.trace, p.lambda);
  } catch (const InvalidArgument& e) {
    ev.checks.push_back(make_check("constant_chain", true, false, -1.0, 0.0, "theorem9: constant selection", e.what()));
    ev.facts.emplace_back("constant chain", fmt::format("aborted: {}", e.what()));
    return ev;
  }
  const BoundSet& b = chain.bounds;
  ProblemParams q = p;
  q.lambda = cfg.lambda_factor * std::max(b.lambda0, b.lambda1);
  ev.details["constants"] = {{"pilot_lambda", p.lambda}, {"c1", chain.c1},          {"c2", chain.c2},
                             {"A0", chain.A0},           {"epsilon_limit", b.epsilon_limit},
                             {"epsilon", b.epsilon},     {"epsilon_halvings", b.epsilon_halvings},
                             {"delta1", b.delta1},       {"lambda0", b.lambda0},    {"lambda1", b.lambda1},
                             {"certified_lambda", q.lambda}};
  ev.facts.emplace_back("constants", fmt::format("c2 = {}, eps = {}, delta1 = {}, lambda0 = {}, lambda1 = {}",
                                                 num(chain.c2), num(b.epsilon), num(b.delta1), num(b.lambda0),
                                                 num(b.lambda1)));
  ev.facts.emplace_back("certified lambda", num(q.lambda));
  ev.checks.push_back(make_check("lambda_above_threshold", true, q.lambda >= 1.1 * b.lambda0, q.lambda - 1.1 * b.lambda0,
                                 0.0, "theorem9: lambda > lambda0", ""));

  const MonitoredRun cert = monitored_run(q, cfg.M, cfg.control);
  const RunResult& run = cert.run;
  const QuenchBoundCheck qb = verify_quench_time_bound(run.report, q, b.delta1);
  add_run_files(ev, run, "");
  add_run_facts(ev, run, qb.applicable ? num(qb.bound) : "not applicable");
  ev.details["run"] = run_json(run.report, "");
  ev.checks.push_back(invariant_check("invariants", cert.monitor));
  ev.checks.push_back(make_check("quenched", true, run.report.quenched, run.report.quenched ? 0.0 : -1.0, 0.0,
                                 "theorem9: finite quenching time", to_string(run.report.reason)));

  const auto c2_cert = estimate_c2(run.trace, q.R);
  const double flux_margin = c2_cert ? cfg.beta * *c2_cert - b.epsilon : -b.epsilon;
  ev.checks.push_back(make_check("boundary_flux", true, flux_margin > 0.0, flux_margin, 0.0,
                                 "theorem9: v_r(R, t) >= c2 R with epsilon < beta c2",
                                 fmt::format("certified-run c2 = {}", c2_cert ? num(*c2_cert) : "not observed")));

  const TransformDiagnostic d = check_qtilde_nonneg(run.report.snapshots, cfg.beta, b.epsilon);
  ev.checks.push_back(make_check("qtilde_nonnegative", true, d.qtilde_pass(), d.qtilde_min + d.qtilde_tolerance(),
                                 d.qtilde_tolerance(), "theorem9: q - eps r^n >= 0",
                                 fmt::format("min qtilde = {}, max |q| = {}", num(d.qtilde_min), num(d.q_abs_max))));
  ev.checks.push_back(make_check("profile_lower_bound", true, d.profile_pass(), d.profile_slack, d.profile_tolerance,
                                 "theorem9: v >= (eps/2)^(1/beta) r^(2/beta)",
                                 fmt::format("min v - C r^p = {}", num(d.profile_margin))));

  const double minA = run.report.delta1_hat;
  ev.checks.push_back(make_check("A_lower_bound", true, minA >= b.delta1, minA - b.delta1, 0.0,
                                 "theorem9: A(t) > delta1 throughout",
                                 fmt::format("min A = {}, delta1 = {}", num(minA), num(b.delta1))));
  ev.checks.push_back(bound_check(qb, "constant chain"));
  return ev;
}

Evaluation evaluate_comparison(const RunConfig& cfg) {
  const ProblemParams& lower = cfg.problem;
  ProblemParams upper = lower;
  upper.initial = cfg.upper;
  Evaluation ev;

  const RadialGrid grid(lower.n, lower.R, cfg.M);
  const SolutionState s1 = make_initial_state(lower, grid);
  const SolutionState s2 = make_initial_state(upper, grid);
  double initial_excess = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) initial_excess = std::max(initial_excess, s1.u[i] - s2.u[i]);
  ev.checks.push_back(make_check("ordered_initial_data", true, initial_excess == 0.0, -initial_excess, 0.0,
                                 "comparison: u1(0) <= u2(0)", ""));

  InvariantMonitor m1(lower, monotone_data(lower), kMonotoneTolerance);
  InvariantMonitor m2(upper, monotone_data(upper), kMonotoneTolerance);
  const ComparisonResult res = check_comparison(lower, upper, cfg.M, cfg.control, m1.observer(), m2.observer());
  ev.checks.push_back(invariant_check("invariants_lower", m1));
  ev.checks.push_back(invariant_check("invariants_upper", m2));
  ev.checks.push_back(make_check("comparison", true, res.max_violation <= res.tolerance, res.tolerance - res.max_violation,
                                 res.tolerance, "comparison principle: u1 <= u2",
                                 fmt::format("max (u1 - u2)+ = {} over {} steps to t = {}", num(res.max_violation),
                                             res.steps, num(res.t_end))));
  ev.details["comparison"] = {{"max_violation", res.max_violation}, {"tolerance", res.tolerance},
                              {"steps", res.steps},                 {"t_end", res.t_end}};
  ev.facts.emplace_back("max violation", num(res.max_violation));
  ev.facts.emplace_back("lockstep", fmt::format("{} steps to t = {}", res.steps, num(res.t_end)));
  return ev;
}

Evaluation evaluate_convergence(const RunConfig& cfg) {
  Evaluation ev;
  ConvergenceStudy study;
  try {
    study = convergence_study(cfg.problem, cfg.M_list, cfg.control);
  } catch (const Error& e) {
    ev.checks.push_back(make_check("observed_order", true, false, -1.0, 0.0, "grid refinement", e.what()));
    ev.facts.emplace_back("convergence", fmt::format("aborted: {}", e.what()));
    return ev;
  }
  std::string csv = "M,h,T_hi,quench_radius\n";
  json rows = json::array();
  for (const ConvergenceRow& r : study.rows) {
    csv += fmt::format("{},{},{},{}\n", r.M, num(r.h), num(r.T_hi), num(r.quench_radius));
    rows.push_back({{"M", r.M}, {"h", r.h}, {"T_hi", r.T_hi}, {"quench_radius", r.quench_radius}});
    ev.checks.push_back(make_check(fmt::format("quench_radius_M{}", r.M), true, r.quench_radius <= 2.0 * r.h,
                                   2.0 * r.h - r.quench_radius, 2.0 * r.h,
                                   "theorem8: the origin is the only quenching point", ""));
  }
  ev.files["convergence.csv"] = csv;
  ev.details["convergence"] = {{"rows", rows}, {"order", study.order}};
  ev.checks.push_back(make_check("observed_order", true, study.order >= kOrderThreshold, study.order - kOrderThreshold,
                                 kOrderThreshold, "grid refinement of the quench time",
                                 fmt::format("order {}", num(study.order))));
  ev.facts.emplace_back("observed order", num(study.order));
  ev.facts.emplace_back("T_hi", fmt::format("{} at M = {}", num(study.rows.back().T_hi), study.rows.back().M));
  return ev;
}

struct SweepCell {
  double lambda = 0.0;
  double chi = 0.0;
  bool quenched = false;
  StopReason reason = StopReason::time_limit;
  double T_hi = 0.0;
  double delta1_hat = 0.0;
  std::size_t steps = 0;
  bool invariants_ok = false;
};

Evaluation evaluate_sweep(const RunConfig& cfg, bool reverse_order) {
  const std::vector<double> lambdas = cfg.lambda_range.values();
  const std::vector<double> chis = cfg.chi_range.values();
  std::vector<SweepCell> cells;
  for (double chi : chis) {
    for (double lambda : lambdas) cells.push_back({lambda, chi});
  }

  std::vector<std::size_t> order(cells.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = reverse_order ? order.size() - 1 - k : k;

  std::vector<std::exception_ptr> errors(cells.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < order.size(); k = next++) {
      SweepCell& c = cells[order[k]];
      try {
        ProblemParams p = cfg.problem;
        p.lambda = c.lambda;
        p.chi = c.chi;
        const MonitoredRun mr = monitored_run(p, cfg.M, cfg.control);
        c.quenched = mr.run.report.quenched;
        c.reason = mr.run.report.reason;
        c.T_hi = mr.run.report.T_hi;
        c.delta1_hat = mr.run.report.delta1_hat;
        c.steps = mr.run.report.steps;
        c.invariants_ok = mr.monitor.ok();
      } catch (...) {
        errors[order[k]] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min(cfg.workers, cells.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (std::thread& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  Evaluation ev;
  std::string csv = "lambda,chi,quenched,stop_reason,T_hi,delta1_hat,steps\n";
  std::size_t quenched = 0;
  std::size_t broken = 0;
  for (const SweepCell& c : cells) {
    csv += fmt::format("{},{},{},{},{},{},{}\n", num(c.lambda), num(c.chi), c.quenched ? 1 : 0, to_string(c.reason),
                       num(c.T_hi), num(c.delta1_hat), c.steps);
    quenched += c.quenched;
    broken += !c.invariants_ok;
  }
  ev.files["sweep.csv"] = csv;

  // For each χ the quenching cells must form an up-set in λ.
  std::size_t upset_violations = 0;
  for (std::size_t j = 0; j < chis.size(); ++j) {
    bool seen = false;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
      const bool q = cells[j * lambdas.size() + i].quenched;
      if (seen && !q) ++upset_violations;
      seen = seen || q;
    }
  }
  ev.checks.push_back(make_check("invariants", true, broken == 0, -static_cast<double>(broken), 0.0,
                                 "positivity, boundary value, monotone profile, A ceiling",
                                 fmt::format("{} of {} cells violate an invariant", broken, cells.size())));
  ev.checks.push_back(make_check("quench_upset_in_lambda", true, upset_violations == 0,
                                 -static_cast<double>(upset_violations), 0.0,
                                 "comparison principle: quenching is monotone in lambda",
                                 fmt::format("{} cells below a quenching cell fail to quench", upset_violations)));
  ev.facts.emplace_back("cells", fmt::format("{} quenched, {} not", quenched, cells.size() - quenched));
  ev.details["sweep"] = {{"cells", cells.size()}, {"quenched", quenched}};
  return ev;
}

Evaluation evaluate_bounds(const RunConfig& cfg) {
  const ProblemParams& p = cfg.problem;
  Evaluation ev;
  const RadialGrid grid(p.n, p.R, cfg.M);
  const SolutionState s0 = make_initial_state(p, grid);
  const double volume = ball_volume(p.n, p.R);
  const double ceiling = 1.0 / ((1.0 + p.chi * volume) * (1.0 + p.chi * volume));

  json b = {{"unit_sphere_area", unit_sphere_area(p.n)},
            {"ball_volume", volume},
            {"A_ceiling", ceiling},
            {"A0", s0.A},
            {"lemma7_lambda_floor", 2.0 * p.n / (s0.A * p.R * p.R)}};
  ev.facts.emplace_back("A ceiling", num(ceiling));
  ev.facts.emplace_back("A(0)", num(s0.A));
  ev.facts.emplace_back("lemma7 needs lambda >", num(2.0 * p.n / (s0.A * p.R * p.R)));

  const InitialDataCheck chk = validate_initial_data(p, Hypothesis::theorem9);
  if (chk.ok()) {
    // Without a pilot run c2 is taken from the initial boundary slope.
    const double c2 = -boundary_derivative(s0.u) / p.R;
    const ConstantChainInput in{p.n, p.R, p.chi, cfg.beta, p.initial.a, *chk.c1, c2, s0.A};
    if (const auto bs = select_constants(in, p.lambda)) {
      b["theorem9"] = {{"c1", *chk.c1},
                       {"c2_initial_slope", c2},
                       {"epsilon_limit", bs->epsilon_limit},
                       {"epsilon", bs->epsilon},
                       {"delta1", bs->delta1},
                       {"lambda0", bs->lambda0},
                       {"lambda1", bs->lambda1},
                       {"c0", bs->c0},
                       {"T_upper", bs->t_upper ? json(*bs->t_upper) : json(nullptr)}};
      ev.facts.emplace_back("theorem9 constants",
                            fmt::format("eps = {}, delta1 = {}, lambda0 = {}, lambda1 = {}", num(bs->epsilon),
                                        num(bs->delta1), num(bs->lambda0), num(bs->lambda1)));
      ev.facts.emplace_back("T bound at lambda", bs->t_upper ? num(*bs->t_upper) : "not applicable");
    }
  } else {
    b["theorem9"] = {{"not_applicable", chk.violations.front()}};
  }
  ev.details["bounds"] = b;
  return ev;
}

Evaluation evaluate(const RunConfig& cfg, Command cmd, bool rerun) {
  switch (cmd) {
    case Command::bounds: return evaluate_bounds(cfg);
    case Command::sweep: return evaluate_sweep(cfg, rerun);
    case Command::convergence: return evaluate_convergence(cfg);
    case Command::simulate:
    case Command::verify: break;
  }
  switch (cfg.mode) {
    case Mode::lemma7: return evaluate_lemma7(cfg);
    case Mode::theorem8: return evaluate_theorem8(cfg);
    case Mode::theorem9: return evaluate_theorem9(cfg);
    case Mode::comparison: return evaluate_comparison(cfg);
    case Mode::convergence: return evaluate_convergence(cfg);
    case Mode::sweep: return evaluate_sweep(cfg, rerun);
  }
  return {};
}

json check_json(const Check& c) {
  return {{"name", c.name},       {"applicable", c.applicable}, {"pass", c.pass},       {"margin", c.margin},
          {"tolerance", c.tolerance}, {"paper_ref", c.paper_ref}, {"detail", c.detail}};
}

}  // namespace

std::string to_string(Command c) {
  switch (c) {
    case Command::simulate: return "simulate";
    case Command::bounds: return "bounds";
    case Command::verify: return "verify";
    case Command::sweep: return "sweep";
    case Command::convergence: return "convergence";
  }
  return "unknown";
}

bool ScenarioOutcome::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return !c.applicable || c.pass; });
}

ScenarioOutcome run_scenario(const RunConfig& cfg, Command cmd) {
  Evaluation ev = evaluate(cfg, cmd, false);

  auto render = [&](const Evaluation& e) {
    json checks = json::array();
    for (const Check& c : e.checks) checks.push_back(check_json(c));
    json config = json::object();
    for (const auto& [k, v] : cfg.resolved()) config[k] = v;
    return json{{"command", to_string(cmd)}, {"config", config}, {"results", e.details}, {"checks", checks}};
  };

  if (cmd == Command::verify) {
    // Sweeps rerun in reverse cell order, which also tests order independence.
    const Evaluation again = evaluate(cfg, cmd, true);
    const bool same = again.files == ev.files && render(again).dump() == render(ev).dump();
    ev.checks.push_back(make_check("deterministic_rerun", true, same, same ? 0.0 : -1.0, 0.0,
                                   "identical config gives byte-identical outputs",
                                   fmt::format("{} output files compared", ev.files.size())));
  }

  ScenarioOutcome out;
  out.command = cmd;
  out.checks = ev.checks;
  out.facts = ev.facts;

  const fs::path dir = cfg.output_dir;
  for (const auto& [name, contents] : ev.files) {
    io::write_file_atomic(dir / name, contents);
    if (name == "trace.csv") out.bundle.trace_csv = dir / name;
    if (name.find("snapshot_") != std::string::npos) out.bundle.snapshot_csvs.push_back(dir / name);
    if (name == "sweep.csv" || name == "convergence.csv") out.bundle.summary_csv = dir / name;
  }

  json report = render(ev);
  json files = json::array();
  for (const auto& [name, contents] : ev.files) files.push_back(name);
  report["files"] = files;
  report["pass"] = out.all_pass();
  const std::string report_name = cmd == Command::bounds ? "bounds.json" : "report.json";
  out.bundle.report_json = dir / report_name;
  io::write_file_atomic(out.bundle.report_json, report.dump(2) + "\n");

  if (cmd == Command::verify) {
    json checks = json::array();
    for (const Check& c : ev.checks) checks.push_back(check_json(c));
    const json verification{{"mode", to_string(cfg.mode)}, {"pass", out.all_pass()}, {"checks", checks}};
    out.bundle.verification_json = dir / "verification.json";
    io::write_file_atomic(out.bundle.verification_json, verification.dump(2) + "\n");
  }
  return out;
}

std::string emit_summary(const RunConfig& cfg, const ScenarioOutcome& outcome) {
  const ProblemParams& p = cfg.problem;
  std::string out = fmt::format("{} [{}]  n={} R={:g} lambda={:g} chi={:g} u0={} M={}\n", to_string(outcome.command),
                                to_string(cfg.mode), p.n, p.R, p.lambda, p.chi, cfg.initial, cfg.M);
  for (const auto& [k, v] : outcome.facts) out += fmt::format("  {}: {}\n", k, v);
  for (const Check& c : outcome.checks) {
    const char* status = !c.applicable ? "n/a " : c.pass ? "PASS" : "FAIL";
    out += fmt::format("  [{}] {}", status, c.name);
    if (c.applicable) out += fmt::format("  margin={:.6g} tol={:.3g}", c.margin, c.tolerance);
    if (!c.detail.empty()) out += fmt::format("  ({})", c.detail);
    out += '\n';
  }
  out += fmt::format("  output: {}\n", outcome.bundle.report_json.string());
  return out;
}

}  // namespace quench::app
