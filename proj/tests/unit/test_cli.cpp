#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "cli.hpp"
#include "helpers.hpp"
#include "radgate/csv.hpp"
#include "radgate/fsutil.hpp"

using namespace radgate;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int status;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int status = cli::run(args, out, err);
  return {status, out.str(), err.str()};
}

std::string p(const fs::path& path) { return path.string(); }

std::size_t count_ext(const fs::path& dir, const std::string& ext) {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(dir)) n += e.path().extension() == ext;
  return n;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("check on clean fixtures writes all-pass flags") {
    testing::TempDir dir("cli-check");
    REQUIRE(run({"gen-fixtures", "--kind", "qc", "--seed", "3", "--out", p(dir.path())}).status == 0);
    auto r = run({"check", "--root", p(dir.path() / "qc/dicom/clean"), "--spec", p(dir.path() / "qc/qc_spec.json"),
                  "--out", p(dir.path() / "qc.csv")});
    CHECK(r.status == cli::kOk);
    auto doc = parse_csv(read_text_file(dir.path() / "qc.csv"));
    REQUIRE(doc.rows.size() == 1);
    for (std::size_t c = 2; c < doc.header.size() - 1; ++c) CHECK(doc.rows[0][c] == "1");
    CHECK(r.err.rfind("check: ", 0) == 0);
  }

  TEST_CASE("unknown flag and unknown subcommand exit 1 with usage") {
    auto flag = run({"check", "--bogus"});
    CHECK(flag.status == cli::kValidationError);
    CHECK(flag.err.find("Usage") != std::string::npos);
    auto sub = run({"frobnicate"});
    CHECK(sub.status == cli::kValidationError);
    CHECK(sub.err.find("UnknownSubcommand") != std::string::npos);
  }

  TEST_CASE("missing input files are I/O errors and leave no output") {
    testing::TempDir dir("cli-io");
    auto r = run({"analyze", "--features", p(dir.path() / "absent.csv"), "--outcome", "y", "--out", p(dir.path() / "out")});
    CHECK(r.status == cli::kIoError);
    CHECK_FALSE(fs::exists(dir.path() / "out"));
  }

  TEST_CASE("invalid configuration is a validation error") {
    testing::TempDir dir("cli-config");
    REQUIRE(run({"gen-fixtures", "--kind", "qc", "--seed", "3", "--out", p(dir.path())}).status == 0);
    write_file_atomic(dir.path() / "bad.json", std::string(R"({"thickness_range": "thin"})"));
    auto r = run({"check", "--root", p(dir.path() / "qc/dicom"), "--spec", p(dir.path() / "bad.json"), "--out",
                  p(dir.path() / "qc.csv")});
    CHECK(r.status == cli::kValidationError);
    CHECK(r.err.find("thickness_range") != std::string::npos);
    CHECK_FALSE(fs::exists(dir.path() / "qc.csv"));
  }

  TEST_CASE("analyze on a binary outcome writes stats and six plots") {
    testing::TempDir dir("cli-analyze");
    REQUIRE(run({"gen-fixtures", "--kind", "features", "--seed", "7", "--out", p(dir.path())}).status == 0);
    auto r = run({"analyze", "--features", p(dir.path() / "features/features_binary.csv"), "--outcome", "1yearsurvival",
                  "--volume", "original_shape_VoxelVolume", "--out", p(dir.path() / "analysis")});
    REQUIRE(r.status == cli::kOk);
    CHECK(fs::exists(dir.path() / "analysis/features_binary_basic_stats.csv"));
    CHECK(count_ext(dir.path() / "analysis/plots", ".svg") == 6);
    CHECK(count_ext(dir.path() / "analysis/plots", ".csv") == 6);
  }

  TEST_CASE("multi-class analyze skips the binary-only plots") {
    testing::TempDir dir("cli-multi");
    REQUIRE(run({"gen-fixtures", "--kind", "features", "--seed", "7", "--out", p(dir.path())}).status == 0);
    auto r = run({"analyze", "--features", p(dir.path() / "features/features_multiclass.csv"), "--outcome",
                  "Overall.Stage", "--volume", "original_shape_VoxelVolume", "--out", p(dir.path() / "analysis")});
    REQUIRE(r.status == cli::kOk);
    CHECK_FALSE(fs::exists(dir.path() / "analysis/plots/mann_whitney.svg"));
    CHECK_FALSE(fs::exists(dir.path() / "analysis/plots/roc_curves.svg"));
    auto nan = parse_csv(read_text_file(dir.path() / "analysis/nan_report.csv"));
    CHECK(nan.rows.size() == 1);
  }

  TEST_CASE("gen-fixtures with the same seed is byte-identical") {
    testing::TempDir a("cli-seed-a"), b("cli-seed-b");
    REQUIRE(run({"gen-fixtures", "--kind", "all", "--seed", "7", "--out", p(a.path())}).status == 0);
    REQUIRE(run({"gen-fixtures", "--kind", "all", "--seed", "7", "--out", p(b.path())}).status == 0);
    auto sa = testing::snapshot_tree(a.path());
    CHECK(sa.size() > 100);
    CHECK(sa == testing::snapshot_tree(b.path()));
  }
}
