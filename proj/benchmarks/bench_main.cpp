#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "tanred/freq_select.hpp"
#include "tanred/gramian_norms.hpp"
#include "tanred/reducer.hpp"
#include "tanred/state_space.hpp"

namespace {

using namespace tanred;

// Stable real test system with a negative definite symmetric part.
StateSpace make_system(Index n, Index p, Index q) {
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> nd;
  auto fill = [&](Index r, Index c) {
    RMatrix m(r, c);
    for (Index i = 0; i < r; ++i)
      for (Index j = 0; j < c; ++j) m(i, j) = nd(rng);
    return m;
  };
  const RMatrix s = fill(n, n), k = fill(n, n);
  RMatrix a = (k - k.transpose()) * 0.5 - s * s.transpose() / static_cast<double>(n);
  a.diagonal().array() -= 0.1;
  return StateSpace::from_real(a, fill(n, q), fill(p, n), RMatrix::Zero(p, q));
}

std::vector<double> log_grid(int points) {
  std::vector<double> w(points);
  for (int i = 0; i < points; ++i) w[i] = std::pow(10.0, -2.0 + 4.0 * i / (points - 1));
  return w;
}

void BM_FreqSweep(benchmark::State& state) {
  const StateSpace g = make_system(state.range(0), 3, 3);
  const auto grid = log_grid(200);
  for (auto _ : state) benchmark::DoNotOptimize(freq_sweep(g, grid));
  state.SetItemsProcessed(state.iterations() * 200);
}
BENCHMARK(BM_FreqSweep)->Arg(50)->Arg(150)->Arg(300);

// Same frequencies through repeated dense evaluation, for comparison.
void BM_EvalTfLoop(benchmark::State& state) {
  const StateSpace g = make_system(state.range(0), 3, 3);
  const auto grid = log_grid(200);
  for (auto _ : state)
    for (const double w : grid) benchmark::DoNotOptimize(eval_tf(g, Complex(0.0, w)));
  state.SetItemsProcessed(state.iterations() * 200);
}
BENCHMARK(BM_EvalTfLoop)->Arg(50)->Arg(150)->Arg(300);

void BM_Gramian(benchmark::State& state) {
  const StateSpace g = make_system(state.range(0), 3, 3);
  for (auto _ : state) benchmark::DoNotOptimize(controllability_gramian(g));
}
BENCHMARK(BM_Gramian)->Arg(50)->Arg(150)->Arg(300);

void BM_PeakGain(benchmark::State& state) {
  const StateSpace g = make_system(state.range(0), 3, 3);
  for (auto _ : state) benchmark::DoNotOptimize(peak_gain(g));
}
BENCHMARK(BM_PeakGain)->Arg(50)->Arg(150);

void BM_Reduce(benchmark::State& state) {
  const StateSpace g = make_system(150, 3, 3);
  ReducerConfig cfg;
  cfg.strategy.kind = static_cast<StrategyKind>(state.range(0));
  for (int i = 0; i < 100; ++i) cfg.strategy.grid.push_back(log_grid(100)[i]);
  cfg.strategy.omega_min = 1e-2;
  cfg.strategy.omega_max = 1e2;
  cfg.max_order = 20;
  cfg.timing = false;
  cfg.track_error = false;
  for (auto _ : state) benchmark::DoNotOptimize(reduce(g, cfg));
  state.SetLabel(strategy_name(cfg.strategy.kind));
}
BENCHMARK(BM_Reduce)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
