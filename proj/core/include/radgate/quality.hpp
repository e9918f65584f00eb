#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "radgate/catalog.hpp"

namespace radgate::quality {

enum class Check {
  Modality,
  Projection,
  SliceConsistency,
  SliceCount,
  Thickness,
  Spacing,
  Kernel,
  Resolution,
  SlopeIntercept,
};

inline constexpr std::array<Check, 9> kAllChecks = {
    Check::Modality,  Check::Projection, Check::SliceConsistency,
    Check::SliceCount, Check::Thickness, Check::Spacing,
    Check::Kernel,    Check::Resolution, Check::SlopeIntercept};

std::string_view check_name(Check check);

struct Range {
  double min = 0.0;
  double max = 0.0;
  bool operator==(const Range&) const = default;
};

enum class Projection { Axial };

/// Target acquisition parameters. A check runs only when its parameter is
/// present; the two parameterless checks have explicit toggles.
struct QualitySpec {
  std::optional<std::string> target_modality;
  std::optional<Projection> projection;
  std::optional<std::size_t> min_slice_count;
  std::optional<Range> thickness_range;
  std::optional<Range> spacing_range;
  std::optional<std::vector<std::string>> kernel_whitelist;
  std::optional<std::array<std::size_t, 2>> required_in_plane;  // (rows, cols)
  bool check_slice_consistency = true;
  bool check_slope_intercept = true;

  bool enabled(Check check) const;
  /// Throws ConfigInvalid when a range is inverted.
  void validate() const;
};

/// Parses the JSON form. Unknown keys and type mismatches raise
/// ConfigInvalid naming the offending field.
QualitySpec parse_quality_spec(std::string_view json);
std::string to_json(const QualitySpec& spec);

enum class Flag { Fail = 0, Pass = 1, Skipped = 2 };

struct QualityRow {
  std::string patient_id;
  std::string series_uid;
  std::array<Flag, 9> flags{};  // indexed like kAllChecks
  bool overall = false;
  std::string note;

  Flag flag(Check check) const { return flags[static_cast<std::size_t>(check)]; }
};

struct QualityReport {
  std::vector<QualityRow> rows;

  std::string to_csv() const;
};

/// Gap thresholds for the slice-consistency rule, relative to the median gap.
inline constexpr double kMissingSliceFactor = 1.5;
inline constexpr double kOverlapSliceFactor = 0.5;
inline constexpr double kProjectionTolerance = 1e-3;
inline constexpr double kThicknessTolerance = 1e-3;

QualityRow check_series(const catalog::SeriesRecord& record, const QualitySpec& spec);

/// Rows are emitted for every record and every rejected series (all enabled
/// flags 0), sorted by patient id then series uid.
QualityReport quality_check(std::span<const catalog::SeriesRecord> records, const QualitySpec& spec,
                            std::span<const catalog::RejectedSeries> rejected = {});

}  // namespace radgate::quality
