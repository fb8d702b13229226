#include <benchmark/benchmark.h>

#include "quantfp/agents.hpp"
#include "quantfp/estimator.hpp"
#include "quantfp/fokker_planck.hpp"

using namespace quantfp;

static void BM_GroverStep(benchmark::State& state) {
  const Grid1D g(-3.0, 3.0, static_cast<int>(state.range(0)));
  const auto v = eval_potential(Potential::double_well_sine(), g);
  auto a = prepare_amplitudes(v, 1.5);
  for (auto _ : state) {
    a = grover_step(a);
    benchmark::DoNotOptimize(a);
  }
  state.SetComplexityN(static_cast<benchmark::IterationCount>(g.size()));
}
BENCHMARK(BM_GroverStep)->DenseRange(5, 12, 1)->Complexity();

static void BM_AnnealedQae(benchmark::State& state) {
  QaeConfig cfg;
  cfg.n_qubits = static_cast<int>(state.range(0));
  const Grid1D g(-3.0, 3.0, cfg.n_qubits);
  const auto p = Potential::double_well_sine();
  for (auto _ : state) benchmark::DoNotOptimize(annealed_qae(p, g, cfg));
}
BENCHMARK(BM_AnnealedQae)->DenseRange(3, 12, 3);

static void BM_EvolveFpUnitTime(benchmark::State& state) {
  const Grid1D g(-3.0, 3.0, static_cast<int>(state.range(0)));
  const auto p = Potential::double_well_sine();
  const auto rho = stationary_analytic(Potential::harmonic(), 0.5, g);
  EvolveOptions opt;
  opt.snapshots = 1;
  opt.convergence_tol = 0.0;
  for (auto _ : state) benchmark::DoNotOptimize(evolve_fp(p, 0.3, g, rho, 1.0, opt));
}
BENCHMARK(BM_EvolveFpUnitTime)->Arg(7)->Arg(9)->Unit(benchmark::kMillisecond);

static void BM_ClassicalEstimate(benchmark::State& state) {
  const Grid1D g(-3.0, 3.0, 7);
  const PartitionProblem prob(Potential::double_well_sine(), 0.3, g);
  Rng rng = make_rng(0);
  const auto k = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(prob.classical_estimate(k, rng));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ClassicalEstimate)->RangeMultiplier(16)->Range(16, 1 << 20);

static void BM_QffUpdate(benchmark::State& state) {
  auto p = AgentParams::zeros(4, 2);
  const Transition t{{0.1, -0.2, 0.3, 0.05}, {0.2, -0.1}, 1.0, {0.2, -0.1, 0.25, 0.0}, false, 0.01};
  const auto pot = Potential::reward_slice();
  const QffConfig cfg;
  for (auto _ : state) {
    p = qff_update(p, t, pot, cfg);
    benchmark::DoNotOptimize(p);
  }
}
BENCHMARK(BM_QffUpdate);
BENCHMARK_MAIN();
