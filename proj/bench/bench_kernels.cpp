// Serial reference vs OpenMP for each parallel kernel.

#include <scenet/global_ext.hpp>
#include <scenet/kernels.hpp>
#include <scenet/learning.hpp>

#include <benchmark/benchmark.h>

#include <random>

using namespace scenet;

namespace {

GameSpec random_spec(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> w(-0.15, 0.15), a(0.05, 0.3);
  Matrix z = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) z(i, j) = w(rng);
    }
  }
  Vector alpha(n);
  for (int i = 0; i < n; ++i) alpha(i) = a(rng);
  return GameSpec::make(WeightedNetwork(z), alpha);
}

Execution mode(const benchmark::State& state) {
  return state.range(1) == 0 ? Execution::serial : Execution::parallel;
}

void label(benchmark::State& state) {
  state.SetLabel(state.range(1) == 0 ? "serial" : "omp x" + std::to_string(kernels::parallel_threads()));
}

void BM_ActiveSetSolves(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const GameSpec spec = random_spec(n, 1);
  std::vector<AgentMask> masks;
  for (AgentMask m = 0; m <= full_set(n); ++m) masks.push_back(m);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::solve_active_sets(spec.net.z(), spec.alpha, masks, mode(state)));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(masks.size()));
  label(state);
}
BENCHMARK(BM_ActiveSetSolves)->ArgsProduct({{10, 14}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_EnumerateSce(benchmark::State& state) {
  const GameSpec spec = random_spec(static_cast<int>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_sce(spec, mode(state)));
  label(state);
}
BENCHMARK(BM_EnumerateSce)->ArgsProduct({{8, 10}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_StabilityProbes(benchmark::State& state) {
  const GameSpec spec = random_spec(static_cast<int>(state.range(0)), 3);
  const auto ne = solve_full_ne(spec);
  if (ne.records.empty()) {
    state.SkipWithError("no Nash equilibrium");
    return;
  }
  ProbeOptions o;
  o.samples = 200;
  o.exec = mode(state);
  for (auto _ : state) benchmark::DoNotOptimize(probe_stability(spec, ne.records.front(), o));
  label(state);
}
BENCHMARK(BM_StabilityProbes)->ArgsProduct({{8, 16}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_PhiMap(benchmark::State& state) {
  const int n = 3;
  Matrix z = Matrix::Constant(n, n, 0.3);
  z.diagonal().setZero();
  const GlobalGameSpec g =
      GlobalGameSpec::make(GameSpec::make(WeightedNetwork(z), Vector::Constant(n, 0.1)), 0.5,
                           Vector::Constant(n, 0.5));
  const auto grid = admissible_grid(g, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(phi_map(g, grid, {}, mode(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.size()));
  label(state);
}
BENCHMARK(BM_PhiMap)->ArgsProduct({{8, 16}, {0, 1}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
