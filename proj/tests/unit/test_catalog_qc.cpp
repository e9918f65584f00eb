#include <doctest.h>

#include <algorithm>

#include "helpers.hpp"
#include "radgate/catalog.hpp"
#include "radgate/csv.hpp"
#include "radgate/dicom_writer.hpp"
#include "radgate/error.hpp"
#include "radgate/fixtures.hpp"
#include "radgate/quality.hpp"

using namespace radgate;
using quality::Check;
using quality::Flag;

namespace {

fixtures::SeriesSpec small_series(const std::string& pid, fixtures::Rng& rng, std::size_t slices) {
  auto spec = fixtures::clean_series(pid, rng);
  spec.slices = slices;
  spec.spheres.clear();
  return spec;
}

catalog::SeriesRecord record_with_z(const std::vector<double>& zs) {
  catalog::SeriesRecord r;
  r.patient_id = "P";
  r.series_uid = "1.2.3";
  r.modality = "CT";
  for (double z : zs) {
    dicom::SliceMeta m;
    m.patient_id = "P";
    m.series_uid = "1.2.3";
    m.modality = "CT";
    m.rows = m.cols = 32;
    m.pixel_spacing = std::array<double, 2>{0.75, 0.75};
    m.image_position = std::array<double, 3>{0, 0, z};
    m.orientation = std::array<double, 6>{1, 0, 0, 0, 1, 0};
    m.slice_thickness = 3.0;
    m.rescale_slope = 1.0;
    m.rescale_intercept = -1024.0;
    m.convolution_kernel = "STANDARD";
    r.slices.push_back(m);
    r.slice_paths.push_back("s" + std::to_string(r.slice_paths.size()) + ".dcm");
  }
  return r;
}

}  // namespace

TEST_SUITE("catalog-qc") {
  TEST_CASE("two patients with three slices each give two sorted records") {
    testing::TempDir dir("scan");
    fixtures::Rng rng(3);
    for (const char* pid : {"B-2", "A-1"}) {
      auto spec = small_series(pid, rng, 3);
      fixtures::write_files(fixtures::series_files(spec, rng, pid), dir.path());
      if (std::string(pid) == "A-1")
        fixtures::write_files({fixtures::rtstruct_file(spec, {fixtures::square_roi(spec, {12, 12}, 4, 0, 10, "sq")}, rng,
                                                       std::string(pid) + "/rtstruct.dcm")},
                              dir.path());
    }
    auto result = catalog::scan_dataset({dir.path()});
    REQUIRE(result.records.size() == 2);
    CHECK(result.records[0].patient_id == "A-1");
    CHECK(result.records[1].patient_id == "B-2");
    for (const auto& r : result.records) {
      CHECK(r.slices.size() == 3);
      CHECK(r.slice_paths.size() == 3);
      for (std::size_t i = 1; i < r.slices.size(); ++i)
        CHECK(r.slices[i].position_along_normal() > r.slices[i - 1].position_along_normal());
    }
    CHECK(result.records[0].rtstruct_paths.size() == 1);
    CHECK(result.records[1].rtstruct_paths.empty());
  }

  TEST_CASE("empty root raises EmptyDataset") {
    testing::TempDir dir("empty");
    try {
      catalog::scan_dataset({dir.path()});
      FAIL("expected EmptyDataset");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::EmptyDataset);
    }
  }

  TEST_CASE("ct describe carries kernel and kVp; default mode keeps rows with absent attributes") {
    testing::TempDir dir("describe");
    fixtures::Rng rng(4);
    auto spec = small_series("P1", rng, 3);
    spec.kernel = "B19f";
    auto files = fixtures::series_files(spec, rng, "P1");
    auto rt = fixtures::rtstruct_file(spec, {fixtures::square_roi(spec, {12, 12}, 4, 0, 10, "sq")}, rng, "P1/rt.dcm");
    files.push_back(rt);
    fixtures::write_files(files, dir.path());

    dicom::SliceMeta bare = fixtures::random_slice_meta(rng);
    bare.patient_id = "P2";
    bare.manufacturer.reset();
    std::vector<std::uint16_t> px(bare.rows * bare.cols, 0);
    fixtures::write_files({{"P2/only.dcm", dicom::write_part10(fixtures::slice_dataset(bare, px))}}, dir.path());

    auto scan = catalog::scan_dataset({dir.path()});
    auto ct = catalog::describe(scan.records, catalog::DescribeMode::Ct);
    auto col = [&](const catalog::MetadataTable& t, const std::string& name) {
      return static_cast<std::size_t>(std::find(t.header.begin(), t.header.end(), name) - t.header.begin());
    };
    REQUIRE(!ct.rows.empty());
    CHECK(ct.rows[0][col(ct, "convolution_kernel")] == "B19f");
    CHECK(ct.rows[0][col(ct, "kvp")] == "120");

    auto all = catalog::describe(scan.records, catalog::DescribeMode::Default);
    std::size_t p2_rows = 0, rt_rows = 0;
    for (const auto& row : all.rows) {
      if (row[0] == "P2") {
        ++p2_rows;
        CHECK(row[col(all, "manufacturer")].empty());
      }
      if (row[col(all, "modality")] == "RTSTRUCT") {
        ++rt_rows;
        CHECK(row[col(all, "slice_thickness")].empty());
        CHECK(row[col(all, "pixel_spacing")].empty());
      }
    }
    CHECK(p2_rows == 1);
    CHECK(rt_rows == 1);
  }

  TEST_CASE("gap of twice the median fails slice consistency") {
    auto spec = fixtures::fixture_quality_spec();
    spec.min_slice_count.reset();
    auto row = quality::check_series(record_with_z({0, 3, 6, 12}), spec);
    CHECK(row.flag(Check::SliceConsistency) == Flag::Fail);
    CHECK_FALSE(row.overall);
    auto even = quality::check_series(record_with_z({0, 3, 6, 9}), spec);
    CHECK(even.flag(Check::SliceConsistency) == Flag::Pass);
    CHECK(even.overall);
  }

  TEST_CASE("disabled checks are skipped and excluded from overall") {
    quality::QualitySpec spec = fixtures::fixture_quality_spec();
    spec.kernel_whitelist.reset();
    auto record = record_with_z({0, 3, 6, 9, 12, 15, 18, 21, 24, 27, 30, 33});
    record.slices[0].convolution_kernel = "WEIRD";
    auto row = quality::check_series(record, spec);
    CHECK(row.flag(Check::Kernel) == Flag::Skipped);
    CHECK(row.overall);
  }

  TEST_CASE("clean 64-slice fixture passes every check") {
    testing::TempDir dir("clean64");
    fixtures::Rng rng(5);
    auto spec = fixtures::clean_series("P1", rng);
    spec.slices = 64;
    fixtures::write_files(fixtures::series_files(spec, rng, "P1"), dir.path());
    auto scan = catalog::scan_dataset({dir.path()});
    auto report = quality::quality_check(scan.records, fixtures::fixture_quality_spec());
    REQUIRE(report.rows.size() == 1);
    for (auto check : quality::kAllChecks) CHECK(report.rows[0].flag(check) == Flag::Pass);
    CHECK(report.rows[0].overall);
  }

  TEST_CASE("missing-slice defect fails only slice consistency") {
    testing::TempDir dir("missing");
    fixtures::Rng rng(6);
    auto spec = fixtures::with_defect(fixtures::clean_series("P1", rng), fixtures::Defect::MissingSlice);
    fixtures::write_files(fixtures::series_files(spec, rng, "P1"), dir.path());
    auto scan = catalog::scan_dataset({dir.path()});
    auto report = quality::quality_check(scan.records, fixtures::fixture_quality_spec());
    REQUIRE(report.rows.size() == 1);
    for (auto check : quality::kAllChecks)
      CHECK(report.rows[0].flag(check) == (check == Check::SliceConsistency ? Flag::Fail : Flag::Pass));
  }

  TEST_CASE("quality result does not depend on slice order") {
    auto spec = fixtures::fixture_quality_spec();
    auto record = record_with_z({0, 3, 6, 9, 12, 15, 18, 21, 24, 27, 30});
    auto a = quality::check_series(record, spec);
    std::reverse(record.slices.begin(), record.slices.end());
    auto b = quality::check_series(record, spec);
    CHECK(a.flags == b.flags);
  }

  TEST_CASE("quality spec JSON round trip and validation") {
    auto spec = fixtures::fixture_quality_spec();
    auto back = quality::parse_quality_spec(quality::to_json(spec));
    CHECK(back.target_modality == spec.target_modality);
    CHECK(back.thickness_range == spec.thickness_range);
    CHECK(back.kernel_whitelist == spec.kernel_whitelist);
    CHECK(back.required_in_plane == spec.required_in_plane);
    CHECK_THROWS_AS(quality::parse_quality_spec(R"({"thickness_range": [3, 1]})"), Error);
    CHECK_THROWS_AS(quality::parse_quality_spec(R"({"bogus": 1})"), Error);
    CHECK_THROWS_AS(quality::parse_quality_spec(R"({"min_slice_count": "ten"})"), Error);
  }

  TEST_CASE("qc report CSV carries one row per series") {
    auto spec = fixtures::fixture_quality_spec();
    auto report = quality::quality_check(std::vector<catalog::SeriesRecord>{record_with_z({0, 3, 6})}, spec);
    auto doc = parse_csv(report.to_csv());
    CHECK(doc.rows.size() == 1);
    CHECK(doc.column("patient") >= 0);
  }
}
