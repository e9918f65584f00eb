#include <benchmark/benchmark.h>

#include "radgate/fixtures.hpp"
#include "radgate/nrrd.hpp"
#include "radgate/preprocess.hpp"

using namespace radgate;

static Volume noise_volume(std::size_t n) {
  Geometry g;
  g.dims = {n, n, n / 2};
  g.spacing = {0.8, 0.8, 2.5};
  fixtures::Rng rng(9);
  std::vector<double> values(g.voxel_count());
  for (auto& v : values) v = std::round(rng.uniform(-1000, 400));
  return Volume(g, std::move(values), PixelType::Int16);
}

static void BM_ReshapeTrilinear(benchmark::State& state) {
  auto v = noise_volume(static_cast<std::size_t>(state.range(0)));
  preprocess::Reshape target{Vec3{1, 1, 1}, std::nullopt, preprocess::Interpolation::Trilinear};
  for (auto _ : state) benchmark::DoNotOptimize(preprocess::reshape(v, target));
}
BENCHMARK(BM_ReshapeTrilinear)->Arg(64)->Arg(128);

static void BM_HistEqualize(benchmark::State& state) {
  auto v = noise_volume(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(preprocess::hist_equalize(v, 256));
}
BENCHMARK(BM_HistEqualize)->Arg(64)->Arg(128);

static void BM_NrrdEncodeDecode(benchmark::State& state) {
  auto v = noise_volume(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(nrrd::decode(nrrd::encode(v)));
}
BENCHMARK(BM_NrrdEncodeDecode)->Arg(64)->Arg(128);
