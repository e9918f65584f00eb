#include "radgate/quality.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <tuple>

#include <json.hpp>

#include "radgate/csv.hpp"
#include "radgate/error.hpp"

namespace radgate::quality {

using nlohmann::json;

std::string_view check_name(Check check) {
  switch (check) {
    case Check::Modality: return "modality";
    case Check::Projection: return "projection";
    case Check::SliceConsistency: return "slice_consistency";
    case Check::SliceCount: return "slice_count";
    case Check::Thickness: return "thickness";
    case Check::Spacing: return "spacing";
    case Check::Kernel: return "kernel";
    case Check::Resolution: return "resolution";
    case Check::SlopeIntercept: return "slope_intercept";
  }
  return "unknown";
}

bool QualitySpec::enabled(Check check) const {
  switch (check) {
    case Check::Modality: return target_modality.has_value();
    case Check::Projection: return projection.has_value();
    case Check::SliceConsistency: return check_slice_consistency;
    case Check::SliceCount: return min_slice_count.has_value();
    case Check::Thickness: return thickness_range.has_value();
    case Check::Spacing: return spacing_range.has_value();
    case Check::Kernel: return kernel_whitelist.has_value();
    case Check::Resolution: return required_in_plane.has_value();
    case Check::SlopeIntercept: return check_slope_intercept;
  }
  return false;
}

void QualitySpec::validate() const {
  auto check_range = [](const std::optional<Range>& r, const char* field) {
    if (r && !(r->min <= r->max))
      throw Error(ErrorCode::ConfigInvalid, std::string(field) + ": min exceeds max");
  };
  check_range(thickness_range, "thickness_range");
  check_range(spacing_range, "spacing_range");
}

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::ConfigInvalid, field + ": " + why);
}

Range parse_range(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    invalid(field, "expected [min, max]");
  return Range{j[0].get<double>(), j[1].get<double>()};
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

QualitySpec parse_quality_spec(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    invalid("<document>", e.what());
  }
  if (!doc.is_object()) invalid("<document>", "expected an object");

  QualitySpec spec;
  std::optional<json> toggles;
  for (const auto& [key, value] : doc.items()) {
    if (key == "target_modality") {
      if (!value.is_string()) invalid(key, "expected a string");
      spec.target_modality = value.get<std::string>();
    } else if (key == "projection") {
      if (!value.is_string() || value.get<std::string>() != "axial") invalid(key, "only \"axial\" is supported");
      spec.projection = Projection::Axial;
    } else if (key == "min_slice_count") {
      if (!value.is_number_unsigned()) invalid(key, "expected a non-negative integer");
      spec.min_slice_count = value.get<std::size_t>();
    } else if (key == "thickness_range") {
      spec.thickness_range = parse_range(value, key);
    } else if (key == "spacing_range") {
      spec.spacing_range = parse_range(value, key);
    } else if (key == "kernel_whitelist") {
      if (!value.is_array()) invalid(key, "expected a list of strings");
      std::vector<std::string> kernels;
      for (const auto& k : value) {
        if (!k.is_string()) invalid(key, "expected a list of strings");
        kernels.push_back(k.get<std::string>());
      }
      spec.kernel_whitelist = std::move(kernels);
    } else if (key == "required_in_plane") {
      if (!value.is_array() || value.size() != 2 || !value[0].is_number_unsigned() ||
          !value[1].is_number_unsigned())
        invalid(key, "expected [rows, cols]");
      spec.required_in_plane = std::array<std::size_t, 2>{value[0].get<std::size_t>(), value[1].get<std::size_t>()};
    } else if (key == "checks") {
      if (!value.is_object()) invalid(key, "expected an object of booleans");
      toggles = value;
    } else {
      invalid(key, "unknown field");
    }
  }

  if (toggles) {
    for (const auto& [key, value] : toggles->items()) {
      std::string field = "checks." + key;
      if (!value.is_boolean()) invalid(field, "expected a boolean");
      bool on = value.get<bool>();
      auto it = std::find_if(kAllChecks.begin(), kAllChecks.end(),
                             [&](Check c) { return check_name(c) == key; });
      if (it == kAllChecks.end()) invalid(field, "unknown check");
      if (*it == Check::SliceConsistency) {
        spec.check_slice_consistency = on;
      } else if (*it == Check::SlopeIntercept) {
        spec.check_slope_intercept = on;
      } else if (on != spec.enabled(*it)) {
        invalid(field, on ? "enabled but its target parameter is missing"
                          : "disabled but its target parameter is present");
      }
    }
  }
  spec.validate();
  return spec;
}

std::string to_json(const QualitySpec& spec) {
  json doc = json::object();
  if (spec.target_modality) doc["target_modality"] = *spec.target_modality;
  if (spec.projection) doc["projection"] = "axial";
  if (spec.min_slice_count) doc["min_slice_count"] = *spec.min_slice_count;
  if (spec.thickness_range) doc["thickness_range"] = {spec.thickness_range->min, spec.thickness_range->max};
  if (spec.spacing_range) doc["spacing_range"] = {spec.spacing_range->min, spec.spacing_range->max};
  if (spec.kernel_whitelist) doc["kernel_whitelist"] = *spec.kernel_whitelist;
  if (spec.required_in_plane) doc["required_in_plane"] = {(*spec.required_in_plane)[0], (*spec.required_in_plane)[1]};
  doc["checks"] = {{"slice_consistency", spec.check_slice_consistency},
                   {"slope_intercept", spec.check_slope_intercept}};
  return doc.dump(2) + "\n";
}

namespace {

bool in_range(double v, const Range& r) { return v >= r.min && v <= r.max; }

bool slices_consistent(const catalog::SeriesRecord& record) {
  const auto& slices = record.slices;
  if (slices.size() < 2) return true;
  std::vector<double> positions;
  for (const auto& s : slices) positions.push_back(s.position_along_normal());
  std::sort(positions.begin(), positions.end());
  std::vector<double> gaps;
  for (std::size_t i = 1; i < positions.size(); ++i) gaps.push_back(positions[i] - positions[i - 1]);
  std::vector<double> sorted = gaps;
  std::sort(sorted.begin(), sorted.end());
  std::size_t n = sorted.size();
  double median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  if (median <= 0) return false;
  return std::all_of(gaps.begin(), gaps.end(), [&](double g) {
    return g <= kMissingSliceFactor * median && g >= kOverlapSliceFactor * median;
  });
}

bool axial(const dicom::SliceMeta& s) {
  if (!s.orientation) return false;
  static constexpr std::array<double, 6> kAxial = {1, 0, 0, 0, 1, 0};
  for (int i = 0; i < 6; ++i)
    if (std::abs((*s.orientation)[i] - kAxial[i]) > kProjectionTolerance) return false;
  return true;
}

bool evaluate(Check check, const catalog::SeriesRecord& record, const QualitySpec& spec) {
  const auto& slices = record.slices;
  const auto& first = slices.front();
  switch (check) {
    case Check::Modality:
      return record.modality == *spec.target_modality;
    case Check::Projection:
      return std::all_of(slices.begin(), slices.end(), axial);
    case Check::SliceConsistency:
      return slices_consistent(record);
    case Check::SliceCount:
      return slices.size() >= *spec.min_slice_count;
    case Check::Thickness: {
      if (!first.slice_thickness) return false;
      double ref = *first.slice_thickness;
      return std::all_of(slices.begin(), slices.end(), [&](const auto& s) {
        return s.slice_thickness && std::abs(*s.slice_thickness - ref) <= kThicknessTolerance &&
               in_range(*s.slice_thickness, *spec.thickness_range);
      });
    }
    case Check::Spacing:
      return std::all_of(slices.begin(), slices.end(), [&](const auto& s) {
        return s.pixel_spacing && in_range((*s.pixel_spacing)[0], *spec.spacing_range) &&
               in_range((*s.pixel_spacing)[1], *spec.spacing_range);
      });
    case Check::Kernel:
      return std::all_of(slices.begin(), slices.end(), [&](const auto& s) {
        if (!s.convolution_kernel) return false;
        std::string k = lower(*s.convolution_kernel);
        return std::any_of(spec.kernel_whitelist->begin(), spec.kernel_whitelist->end(),
                           [&](const std::string& w) { return lower(w) == k; });
      });
    case Check::Resolution:
      return first.rows == (*spec.required_in_plane)[0] && first.cols == (*spec.required_in_plane)[1];
    case Check::SlopeIntercept:
      return std::all_of(slices.begin(), slices.end(),
                         [](const auto& s) { return s.rescale_slope && s.rescale_intercept; });
  }
  return false;
}

}  // namespace

QualityRow check_series(const catalog::SeriesRecord& record, const QualitySpec& spec) {
  QualityRow row;
  row.patient_id = record.patient_id;
  row.series_uid = record.series_uid;
  row.overall = true;
  if (record.slices.empty()) {
    row.note = "series has no slices";
    for (Check c : kAllChecks)
      row.flags[static_cast<std::size_t>(c)] = spec.enabled(c) ? Flag::Fail : Flag::Skipped;
    row.overall = false;
    return row;
  }
  std::vector<std::string> failed;
  for (Check c : kAllChecks) {
    auto& flag = row.flags[static_cast<std::size_t>(c)];
    if (!spec.enabled(c)) {
      flag = Flag::Skipped;
      continue;
    }
    flag = evaluate(c, record, spec) ? Flag::Pass : Flag::Fail;
    if (flag == Flag::Fail) {
      row.overall = false;
      failed.emplace_back(check_name(c));
    }
  }
  for (std::size_t i = 0; i < failed.size(); ++i) row.note += (i ? ";" : "failed:") + failed[i];
  return row;
}

QualityReport quality_check(std::span<const catalog::SeriesRecord> records, const QualitySpec& spec,
                            std::span<const catalog::RejectedSeries> rejected) {
  spec.validate();
  QualityReport report;
  for (const auto& r : records) report.rows.push_back(check_series(r, spec));
  for (const auto& r : rejected) {
    QualityRow row;
    row.patient_id = r.patient_id;
    row.series_uid = r.series_uid;
    for (Check c : kAllChecks)
      row.flags[static_cast<std::size_t>(c)] = spec.enabled(c) ? Flag::Fail : Flag::Skipped;
    row.overall = false;
    row.note = "unreadable: " + r.reason;
    report.rows.push_back(std::move(row));
  }
  std::sort(report.rows.begin(), report.rows.end(), [](const auto& a, const auto& b) {
    return std::tie(a.patient_id, a.series_uid) < std::tie(b.patient_id, b.series_uid);
  });
  return report;
}

std::string QualityReport::to_csv() const {
  CsvWriter w;
  std::vector<std::string> header{"patient", "series_uid"};
  for (Check c : kAllChecks) header.emplace_back(check_name(c));
  header.emplace_back("overall");
  header.emplace_back("note");
  w.row(header);
  for (const auto& r : rows) {
    std::vector<std::string> cells{r.patient_id, r.series_uid};
    for (Flag f : r.flags) cells.push_back(f == Flag::Skipped ? "skipped" : f == Flag::Pass ? "1" : "0");
    cells.push_back(r.overall ? "1" : "0");
    cells.push_back(r.note);
    w.row(cells);
  }
  return w.str();
}

}  // namespace radgate::quality
