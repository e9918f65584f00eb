#include <benchmark/benchmark.h>

#include "radgate/analysis.hpp"
#include "radgate/fixtures.hpp"

using namespace radgate;

static void BM_RocCurve(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  fixtures::Rng rng(3);
  std::vector<double> scores(n);
  std::vector<bool> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    scores[i] = rng.uniform();
    labels[i] = rng.below(2) == 1;
  }
  for (auto _ : state) benchmark::DoNotOptimize(analysis::roc_curve(scores, labels));
}
BENCHMARK(BM_RocCurve)->Arg(100)->Arg(10000);

static void BM_MannWhitneyExact(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(analysis::mann_whitney_exact_p(double(n * n / 4), n / 2, n - n / 2));
}
BENCHMARK(BM_MannWhitneyExact)->Arg(10)->Arg(25);

static void BM_Spearman(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  fixtures::Rng rng(4);
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = rng.uniform();
    y[i] = x[i] + rng.normal();
  }
  for (auto _ : state) benchmark::DoNotOptimize(analysis::spearman(x, y));
}
BENCHMARK(BM_Spearman)->Arg(100)->Arg(10000);
