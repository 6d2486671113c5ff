#include <benchmark/benchmark.h>

#include "quench/analysis.hpp"
#include "quench/solver.hpp"

using namespace quench;

namespace {

ProblemParams params(int n) {
  ProblemParams p;
  p.n = n;
  p.lambda = 30.0;
  p.chi = 0.1;
  p.initial = InitialData::parabolic(0.5);
  return p;
}

void BM_LaplacianApply(benchmark::State& state) {
  const RadialGrid g(3, 1.0, static_cast<std::size_t>(state.range(0)));
  const RadialField f = RadialField::from_function(g, [](double r) { return 1.0 - r * r; });
  for (auto _ : state) benchmark::DoNotOptimize(radial_laplacian_apply(f));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LaplacianApply)->Arg(201)->Arg(401)->Arg(1601);

void BM_BallIntegral(benchmark::State& state) {
  const RadialGrid g(3, 1.0, static_cast<std::size_t>(state.range(0)));
  const RadialField f = RadialField::from_function(g, [](double r) { return 1.0 / (1.0 - 0.5 * (1.0 - r * r)); });
  for (auto _ : state) benchmark::DoNotOptimize(ball_integral(f));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BallIntegral)->Arg(201)->Arg(401)->Arg(1601);

void BM_ImexAdvance(benchmark::State& state) {
  const ProblemParams p = params(3);
  const RadialGrid g(p.n, p.R, static_cast<std::size_t>(state.range(0)));
  ImexIntegrator integ(p, g);
  const SolutionState s0 = make_initial_state(p, g);
  SolutionState s = s0;
  const double dt = 1e-7;
  for (auto _ : state) {
    if (integ.advance(s, dt, 1e-3) != StepStatus::accepted) s = s0;
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ImexAdvance)->Arg(201)->Arg(401)->Arg(1601);

void BM_RunToQuench(benchmark::State& state) {
  const ProblemParams p = params(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(run_to_quench(p, 101, StepControl{}).report.T_hi);
}
BENCHMARK(BM_RunToQuench)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_Comparison(benchmark::State& state) {
  ProblemParams lo = params(1);
  lo.initial = InitialData::zero();
  ProblemParams hi = params(1);
  hi.initial = InitialData::parabolic(0.1);
  for (auto _ : state) benchmark::DoNotOptimize(check_comparison(lo, hi, 101, StepControl{}).max_violation);
}
BENCHMARK(BM_Comparison)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
