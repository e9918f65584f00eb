#include <benchmark/benchmark.h>

#include "radgate/features.hpp"
#include "radgate/fixtures.hpp"

using namespace radgate;

namespace {

struct Roi {
  Volume volume;
  Mask mask;
};

Roi sphere_roi(std::size_t n) {
  Geometry g;
  g.dims = {n, n, n};
  fixtures::Rng rng(5);
  std::vector<double> values(g.voxel_count());
  std::vector<std::uint8_t> mask(g.voxel_count());
  const double c = 0.5 * static_cast<double>(n - 1), r2 = 0.16 * static_cast<double>(n * n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) {
        double d2 = (double(i) - c) * (double(i) - c) + (double(j) - c) * (double(j) - c) + (double(k) - c) * (double(k) - c);
        values[g.offset(i, j, k)] = rng.uniform(-100, 200);
        mask[g.offset(i, j, k)] = d2 <= r2;
      }
  return {Volume(g, values), Mask(g, mask)};
}

}  // namespace

static void BM_Glcm(benchmark::State& state) {
  auto roi = sphere_roi(static_cast<std::size_t>(state.range(0)));
  features::Discretization d{preprocess::BinMode::FixedBinCount, 32};
  for (auto _ : state) benchmark::DoNotOptimize(features::glcm(roi.volume, roi.mask, d));
}
BENCHMARK(BM_Glcm)->Arg(32)->Arg(64);

static void BM_Shape(benchmark::State& state) {
  auto roi = sphere_roi(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(features::shape(roi.mask));
}
BENCHMARK(BM_Shape)->Arg(32)->Arg(64);

static void BM_FirstOrder(benchmark::State& state) {
  auto roi = sphere_roi(static_cast<std::size_t>(state.range(0)));
  features::Discretization d{preprocess::BinMode::FixedBinWidth, 25};
  for (auto _ : state) benchmark::DoNotOptimize(features::first_order(roi.volume, roi.mask, d));
}
BENCHMARK(BM_FirstOrder)->Arg(32)->Arg(64);
