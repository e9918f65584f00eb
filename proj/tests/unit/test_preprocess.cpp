#include <doctest.h>

#include <cmath>
#include <memory>
#include <numeric>

#include "helpers.hpp"
#include "radgate/error.hpp"
#include "radgate/preprocess.hpp"

using namespace radgate;
using namespace radgate::preprocess;

namespace {

Volume ramp_values(std::size_t n, double lo, double step) {
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = lo + step * static_cast<double>(i);
  return testing::volume({n, 1, 1}, values);
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::IoFailure;
}

}  // namespace

TEST_SUITE("preprocess") {
  TEST_CASE("rescale is affine onto the target range") {
    auto out = rescale(ramp_values(101, 0, 1), 0, 1);
    CHECK(out.voxels()[50] == doctest::Approx(0.5).epsilon(1e-15));
    auto ends = rescale(testing::volume({2, 1, 1}, {-1024, 3071}), 0, 255);
    CHECK(ends.voxels()[0] == 0.0);
    CHECK(ends.voxels()[1] == 255.0);
    CHECK(code_of([] { rescale(testing::volume({2, 1, 1}, {3, 3}), 0, 1); }) == ErrorCode::DegenerateIntensity);
    CHECK(code_of([] { validate(Rescale{1, 1}); }) == ErrorCode::InvalidParameter);
  }

  TEST_CASE("zscore of 1..4 and idempotence") {
    auto v = testing::volume({4, 1, 1}, {1, 2, 3, 4});
    auto z = zscore(v);
    CHECK(z.voxels()[3] == doctest::Approx(1.5 / std::sqrt(1.25)).epsilon(1e-12));
    CHECK(z.voxels()[3] == doctest::Approx(1.3416).epsilon(1e-4));
    auto again = zscore(z);
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(again.voxels()[i] - z.voxels()[i]) <= 1e-12);
  }

  TEST_CASE("zscore over a constant ROI is degenerate") {
    auto v = testing::volume({4, 1, 1}, {5, 5, 1, 9});
    Mask m(v.geometry(), {1, 1, 0, 0});
    CHECK(code_of([&] { zscore(v, &m); }) == ErrorCode::DegenerateIntensity);
    Mask wide(v.geometry(), {1, 1, 1, 0});
    auto out = zscore(v, &wide);
    double mean = (5 + 5 + 1) / 3.0;
    double sd = std::sqrt(((5 - mean) * (5 - mean) * 2 + (1 - mean) * (1 - mean)) / 3);
    CHECK(out.voxels()[3] == doctest::Approx((9 - mean) / sd).epsilon(1e-12));
  }

  TEST_CASE("hist_match against itself is the identity within a bin") {
    auto v = ramp_values(500, -300, 1.7);
    auto out = hist_match(v, v, 256);
    double bin = (v.voxels().back() - v.voxels().front()) / 256;
    for (std::size_t i = 0; i < 500; ++i) CHECK(std::abs(out.voxels()[i] - v.voxels()[i]) <= bin);
  }

  TEST_CASE("hist_match maps uniform [0,1] onto uniform [10,20]") {
    auto source = ramp_values(2001, 0, 1.0 / 2000);
    auto reference = ramp_values(3001, 10, 10.0 / 3000);
    auto out = hist_match(source, reference, 256);
    double bin = 10.0 / 256;
    for (std::size_t i = 0; i < 2001; ++i)
      CHECK(std::abs(out.voxels()[i] - (10 + 10 * source.voxels()[i])) <= bin);
    CHECK(code_of([&] { hist_match(source, reference, 1); }) == ErrorCode::InvalidParameter);
    CHECK_THROWS_AS(parse_params(R"({"steps":[{"step":"hist_match","reference":"r","levels":1}]})",
                                 [&](const std::string&) { return reference; }),
                    Error);
  }

  TEST_CASE("hist_equalize sends two spikes to CDF 0.9 and 1.0") {
    std::vector<double> values(1000, 0.0);
    std::fill(values.begin() + 900, values.end(), 255.0);
    auto out = hist_equalize(testing::volume({1000, 1, 1}, values), 256);
    CHECK(out.voxels()[0] == doctest::Approx(0.9 * 255).epsilon(1e-12));
    CHECK(out.voxels()[999] == doctest::Approx(255).epsilon(1e-12));
    CHECK(code_of([] { hist_equalize(testing::volume({2, 1, 1}, {1, 1}), 16); }) == ErrorCode::DegenerateIntensity);
  }

  TEST_CASE("hist_equalize leaves a uniform histogram in place") {
    auto v = ramp_values(256, 0, 1);
    auto out = hist_equalize(v, 256);
    for (std::size_t i = 0; i < 256; ++i) CHECK(std::abs(out.voxels()[i] - v.voxels()[i]) <= 1.0 + 1e-9);
  }

  TEST_CASE("fixed bin count clamps the maximum and fixed bin width anchors at the minimum") {
    auto levels = intensity_resample(ramp_values(11, 0, 1), BinMode::FixedBinCount, 5);
    CHECK(levels.voxels()[0] == 1);
    CHECK(levels.voxels()[10] == 5);
    CHECK(levels.pixel_type() == PixelType::Int16);
    auto width = intensity_resample(testing::volume({3, 1, 1}, {-50, 0, 30}), BinMode::FixedBinWidth, 25);
    CHECK(width.voxels()[0] == 1);
    CHECK(width.voxels()[1] == 3);
    CHECK(width.voxels()[2] == 4);
  }

  TEST_CASE("reshape 4^3 at 1 mm to 2 mm gives 2^3 and keeps constants") {
    auto v = testing::volume({4, 4, 4}, std::vector<double>(64, 3.25));
    for (auto interp : {Interpolation::Trilinear, Interpolation::Nearest}) {
      Reshape target{Vec3{2, 2, 2}, std::nullopt, interp};
      auto out = reshape(v, target);
      CHECK(out.dims() == Dims{2, 2, 2});
      CHECK(out.geometry().spacing == Vec3{2, 2, 2});
      for (double x : out.voxels()) CHECK(x == 3.25);
    }
  }

  TEST_CASE("trilinear reshape reproduces a linear ramp") {
    Geometry g;
    g.dims = {9, 5, 4};
    g.spacing = {1, 1.5, 2};
    g.origin = {-4, 2, 7};
    std::vector<double> values(g.voxel_count());
    for (std::size_t k = 0; k < 4; ++k)
      for (std::size_t j = 0; j < 5; ++j)
        for (std::size_t i = 0; i < 9; ++i)
          values[g.offset(i, j, k)] = 3 * g.index_to_physical({double(i), double(j), double(k)})[0] -
                                      0.5 * g.index_to_physical({double(i), double(j), double(k)})[2];
    Volume v(g, values);
    auto out = reshape(v, Reshape{Vec3{0.7, 0.6, 0.9}, std::nullopt, Interpolation::Trilinear});
    const auto& og = out.geometry();
    std::size_t checked = 0;
    for (std::size_t k = 0; k < og.dims[2]; ++k)
      for (std::size_t j = 0; j < og.dims[1]; ++j)
        for (std::size_t i = 0; i < og.dims[0]; ++i) {
          auto p = og.index_to_physical({double(i), double(j), double(k)});
          auto idx = g.physical_to_index(p);
          bool inside = true;
          for (int a = 0; a < 3; ++a) inside = inside && idx[a] >= 0 && idx[a] <= double(g.dims[a] - 1);
          if (!inside) continue;
          ++checked;
          CHECK(std::abs(out.at(i, j, k) - (3 * p[0] - 0.5 * p[2])) <= 1e-9);
        }
    CHECK(checked > 100);
  }

  TEST_CASE("nearest reshape of a mask stays binary") {
    Geometry g;
    g.dims = {4, 4, 4};
    Mask m(g);
    m.at(1, 1, 1) = m.at(2, 2, 2) = 1;
    auto out = reshape(m, Reshape{std::nullopt, Dims{8, 8, 8}, Interpolation::Nearest});
    CHECK(out.dims() == Dims{8, 8, 8});
    for (auto x : out.voxels()) CHECK((x == 0 || x == 1));
    CHECK(out.count() == 16);
  }

  TEST_CASE("empty chain is the identity") {
    auto v = ramp_values(10, 0, 1);
    auto result = run_chain(v, {});
    CHECK(result.volume == v);
    CHECK(result.stats.empty());
  }

  TEST_CASE("rescale then zscore gives zero mean") {
    auto params = parse_params(R"({"steps":[{"step":"rescale","out_min":0,"out_max":1},{"step":"zscore"}]})");
    auto result = run_chain(ramp_values(101, 0, 1), params);
    CHECK(std::abs(intensity_stats(result.volume).mean) <= 1e-9);
    REQUIRE(result.stats.size() == 2);
    CHECK(result.stats[0].index == 1);
    CHECK(result.stats[1].step == "zscore");
    CHECK(result.stats[0].output.max == 1.0);
  }

  TEST_CASE("a failing second step is named in the error") {
    PreprocessParams params{{Rescale{0, 1}, BiasFieldCorrection{}}};
    try {
      run_chain(ramp_values(10, 0, 1), params);
      FAIL("expected StepError");
    } catch (const StepError& e) {
      CHECK(e.step() == 2);
      CHECK(e.code() == ErrorCode::NotImplemented);
      CHECK(std::string(e.what()).find("step 2") != std::string::npos);
    }
  }

  TEST_CASE("steps are pure") {
    auto params = parse_params(
        R"({"steps":[{"step":"reshape","spacing":[0.5,1,1]},{"step":"hist_equalize","bins":64},{"step":"intensity_resample","bin_count":8}]})");
    auto v = ramp_values(40, -5, 0.37);
    CHECK(run_chain(v, params).volume == run_chain(v, params).volume);
  }

  TEST_CASE("parameter parsing rejects malformed steps") {
    CHECK_THROWS_AS(parse_params(R"({"steps":[{"step":"warp"}]})"), Error);
    CHECK_THROWS_AS(parse_params(R"({"steps":[{"step":"rescale","out_min":1,"out_max":0}]})"), Error);
    CHECK_THROWS_AS(parse_params(R"({"steps":[{"step":"intensity_resample","bin_count":8,"bin_width":2}]})"), Error);
    CHECK_THROWS_AS(parse_params(R"({"steps":[{"step":"reshape","spacing":[1,1,1],"dims":[2,2,2]}]})"), Error);
    CHECK_THROWS_AS(parse_params(R"({"steps":[{"step":"hist_equalize","bins":1}]})"), Error);
  }
}
