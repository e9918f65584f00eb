#include <doctest.h>

#include "helpers.hpp"
#include "radgate/analysis.hpp"
#include "radgate/catalog.hpp"
#include "radgate/fixtures.hpp"
#include "radgate/quality.hpp"

using namespace radgate;

TEST_SUITE("fixtures") {
  TEST_CASE("every defect name parses back") {
    CHECK(fixtures::parse_defect("clean") == fixtures::Defect::None);
    for (auto d : fixtures::kAllDefects) CHECK(fixtures::parse_defect(fixtures::defect_name(d)) == d);
    CHECK_FALSE(fixtures::parse_defect("nonsense").has_value());
  }

  TEST_CASE("missing-slice series fails exactly the slice-consistency check") {
    testing::TempDir dir("fx-missing");
    fixtures::Rng rng(17);
    auto spec = fixtures::with_defect(fixtures::clean_series("P", rng), fixtures::Defect::MissingSlice);
    fixtures::write_files(fixtures::series_files(spec, rng, "P"), dir.path());
    auto scan = catalog::scan_dataset({dir.path()});
    auto row = quality::quality_check(scan.records, fixtures::fixture_quality_spec()).rows.at(0);
    for (auto check : quality::kAllChecks)
      CHECK((row.flag(check) == quality::Flag::Fail) == (check == quality::Check::SliceConsistency));
  }

  TEST_CASE("planted feature separates the binary classes") {
    testing::TempDir dir("fx-planted");
    fixtures::write_files(fixtures::generate(fixtures::Kind::Features, 7), dir.path());
    analysis::LoadOptions opts;
    opts.outcome_column = fixtures::kBinaryOutcome;
    auto table = analysis::load_file(dir.path() / "features/features_binary.csv", opts);
    for (const auto& row : analysis::univariate_roc(table))
      if (row.feature == fixtures::kPlantedFeature) CHECK(row.curve->auc == 1.0);
  }

  TEST_CASE("generation is seed-determined") {
    auto a = fixtures::generate(fixtures::Kind::Cohort, 5);
    auto b = fixtures::generate(fixtures::Kind::Cohort, 5);
    auto c = fixtures::generate(fixtures::Kind::Cohort, 6);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].relative == b[i].relative);
      CHECK(a[i].bytes == b[i].bytes);
    }
    bool differs = a.size() != c.size();
    for (std::size_t i = 0; !differs && i < a.size(); ++i) differs = a[i].bytes != c[i].bytes;
    CHECK(differs);
  }
}
