#include <benchmark/benchmark.h>

#include "radgate/dicom_writer.hpp"
#include "radgate/fixtures.hpp"
#include "radgate/slice_meta.hpp"

using namespace radgate;

static void BM_ParseSlice(benchmark::State& state) {
  fixtures::Rng rng(1);
  auto spec = fixtures::clean_series("P", rng);
  spec.rows = spec.cols = static_cast<std::size_t>(state.range(0));
  spec.slices = 2;
  auto files = fixtures::series_files(spec, rng, "s");
  const auto& bytes = files.front().bytes;
  for (auto _ : state) {
    auto obj = dicom::parse_file(bytes);
    auto pixels = dicom::decode_pixels(obj);
    benchmark::DoNotOptimize(pixels.values.data());
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * bytes.size()));
}
BENCHMARK(BM_ParseSlice)->Arg(64)->Arg(256)->Arg(512);

static void BM_ExtractSliceMeta(benchmark::State& state) {
  fixtures::Rng rng(2);
  auto meta = fixtures::random_slice_meta(rng);
  std::vector<std::uint16_t> px(meta.rows * meta.cols, 0);
  auto bytes = dicom::write_part10(fixtures::slice_dataset(meta, px));
  auto obj = dicom::parse_file(bytes);
  for (auto _ : state) benchmark::DoNotOptimize(dicom::extract_slice_meta(obj));
}
BENCHMARK(BM_ExtractSliceMeta);

static void BM_WritePart10(benchmark::State& state) {
  fixtures::Rng rng(3);
  auto meta = fixtures::random_slice_meta(rng);
  meta.rows = meta.cols = 256;
  std::vector<std::uint16_t> px(meta.rows * meta.cols, 1024);
  auto ds = fixtures::slice_dataset(meta, px);
  for (auto _ : state) benchmark::DoNotOptimize(dicom::write_part10(ds));
}
BENCHMARK(BM_WritePart10);
