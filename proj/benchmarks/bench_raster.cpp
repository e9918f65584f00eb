#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "radgate/raster.hpp"

using namespace radgate;

static dicom::ContourSet circle_stack(std::size_t vertices, std::size_t slices, double radius, double center) {
  dicom::ContourSet set;
  for (std::size_t k = 0; k < slices; ++k) {
    dicom::Polygon poly;
    for (std::size_t v = 0; v < vertices; ++v) {
      double a = 2 * std::numbers::pi * static_cast<double>(v) / static_cast<double>(vertices);
      poly.push_back({center + radius * std::cos(a), center + radius * std::sin(a), static_cast<double>(k)});
    }
    set.planar_contours.push_back(poly);
  }
  return set;
}

static void BM_Rasterize(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto vertices = static_cast<std::size_t>(state.range(1));
  Geometry g;
  g.dims = {n, n, 32};
  auto set = circle_stack(vertices, 32, 0.4 * static_cast<double>(n), 0.5 * static_cast<double>(n));
  for (auto _ : state) {
    auto result = rasterize(set, g);
    benchmark::DoNotOptimize(result.mask.voxels().data());
  }
}
BENCHMARK(BM_Rasterize)->Args({128, 16})->Args({256, 16})->Args({256, 256})->Args({512, 64});
