#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "radgate/analysis.hpp"
#include "radgate/error.hpp"
#include "radgate/numfmt.hpp"

namespace radgate::analysis {

std::size_t FeatureTable::feature_index(std::string_view name) const {
  auto it = std::lower_bound(features.begin(), features.end(), name);
  if (it == features.end() || *it != name) throw Error(ErrorCode::UnknownFeature, "no feature column '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - features.begin());
}

namespace {

bool contains(const std::vector<std::string>& list, std::string_view value) {
  return std::find(list.begin(), list.end(), value) != list.end();
}

std::optional<std::vector<double>> numeric_column(const CsvDocument& doc, std::size_t col,
                                                  const std::vector<std::size_t>& rows) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) {
    std::string_view cell = trim(doc.rows[r][col]);
    if (cell.empty()) {
      out.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    auto value = parse_double(cell);
    if (!value) return std::nullopt;
    out.push_back(std::isfinite(*value) ? *value : std::numeric_limits<double>::quiet_NaN());
  }
  return out;
}

}  // namespace

FeatureTable load(const CsvDocument& doc, const LoadOptions& options, const CsvDocument* clinical) {
  long patient_col = doc.column(options.patient_column);
  if (patient_col < 0)
    throw Error(ErrorCode::ConfigInvalid, "patient column '" + options.patient_column + "' not found");
  long outcome_col = doc.column(options.outcome_column);
  long clinical_patient = -1, clinical_outcome = -1;
  if (outcome_col < 0 && clinical) {
    clinical_patient = clinical->column(options.patient_column);
    clinical_outcome = clinical->column(options.outcome_column);
    if (clinical_patient < 0)
      throw Error(ErrorCode::ConfigInvalid, "clinical table lacks patient column '" + options.patient_column + "'");
  }
  if (outcome_col < 0 && clinical_outcome < 0)
    throw Error(ErrorCode::MissingOutcomeColumn, "outcome column '" + options.outcome_column + "' not found");

  std::map<std::string, std::string> clinical_outcomes;
  if (clinical_outcome >= 0) {
    for (const auto& row : clinical->rows) {
      std::string id(trim(row[static_cast<std::size_t>(clinical_patient)]));
      if (!clinical_outcomes.emplace(id, std::string(trim(row[static_cast<std::size_t>(clinical_outcome)]))).second)
        throw Error(ErrorCode::DuplicatePatient, "patient '" + id + "' repeated in clinical table");
    }
  }

  FeatureTable table;
  table.outcome_name = options.outcome_column;
  std::vector<std::size_t> kept_rows;
  std::set<std::string> seen;
  for (std::size_t r = 0; r < doc.rows.size(); ++r) {
    std::string id(trim(doc.rows[r][static_cast<std::size_t>(patient_col)]));
    if (!seen.insert(id).second) throw Error(ErrorCode::DuplicatePatient, "patient '" + id + "' repeated");
    if (contains(options.drop_patients, id)) continue;
    kept_rows.push_back(r);
    table.patients.push_back(id);
    if (outcome_col >= 0) {
      table.outcome.emplace_back(trim(doc.rows[r][static_cast<std::size_t>(outcome_col)]));
    } else {
      auto it = clinical_outcomes.find(id);
      table.outcome.push_back(it == clinical_outcomes.end() ? std::string() : it->second);
    }
  }

  for (const auto& name : options.include)
    if (doc.column(name) < 0) throw Error(ErrorCode::UnknownFeature, "included feature '" + name + "' not found");

  std::vector<std::pair<std::string, std::vector<double>>> columns;
  for (std::size_t c = 0; c < doc.header.size(); ++c) {
    const std::string& name = doc.header[c];
    if (static_cast<long>(c) == patient_col || static_cast<long>(c) == outcome_col) continue;
    if (!options.include.empty() && !contains(options.include, name)) continue;
    if (contains(options.exclude, name)) continue;
    auto values = numeric_column(doc, c, kept_rows);
    if (!values) continue;
    columns.emplace_back(name, std::move(*values));
  }
  if (columns.empty()) throw Error(ErrorCode::NoFeatureColumns, "no numeric feature columns remain");
  std::sort(columns.begin(), columns.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& [name, values] : columns) {
    if (!table.features.empty() && table.features.back() == name)
      throw Error(ErrorCode::ConfigInvalid, "feature column '" + name + "' repeated");
    table.features.push_back(name);
    table.values.push_back(std::move(values));
  }
  return table;
}

FeatureTable load_file(const fs::path& features, const LoadOptions& options, const std::optional<fs::path>& clinical) {
  CsvDocument doc = parse_csv(read_text_file(features));
  std::optional<CsvDocument> clinical_doc;
  if (clinical) clinical_doc = parse_csv(read_text_file(*clinical));
  FeatureTable table = load(doc, options, clinical_doc ? &*clinical_doc : nullptr);
  table.source = features.string();
  return table;
}

std::vector<std::string> class_labels(const FeatureTable& table) {
  std::set<std::string> labels;
  for (const auto& o : table.outcome)
    if (!o.empty()) labels.insert(o);
  return {labels.begin(), labels.end()};
}

bool is_binary(const FeatureTable& table) { return class_labels(table).size() == 2; }

ClassSummary class_summary(const FeatureTable& table) {
  ClassSummary summary;
  summary.labels = class_labels(table);
  std::size_t missing = std::count(table.outcome.begin(), table.outcome.end(), std::string());
  if (missing) summary.labels.emplace_back();
  for (const auto& label : summary.labels)
    summary.counts.push_back(static_cast<std::size_t>(std::count(table.outcome.begin(), table.outcome.end(), label)));
  const double total = static_cast<double>(table.outcome.size());
  for (std::size_t c : summary.counts) summary.balance.push_back(static_cast<double>(c) / total);
  return summary;
}

NanReport handle_nan(const FeatureTable& table, Axis axis) {
  NanReport report;
  FeatureTable& out = report.table;
  out.source = table.source;
  out.outcome_name = table.outcome_name;
  if (axis == Axis::Patients) {
    std::vector<std::size_t> keep;
    for (std::size_t p = 0; p < table.patients.size(); ++p) {
      bool complete = !table.outcome[p].empty();
      for (const auto& col : table.values) complete = complete && !std::isnan(col[p]);
      if (complete)
        keep.push_back(p);
      else
        report.dropped.push_back(table.patients[p]);
    }
    out.features = table.features;
    for (std::size_t p : keep) {
      out.patients.push_back(table.patients[p]);
      out.outcome.push_back(table.outcome[p]);
    }
    for (const auto& col : table.values) {
      std::vector<double> kept;
      for (std::size_t p : keep) kept.push_back(col[p]);
      out.values.push_back(std::move(kept));
    }
  } else {
    out.patients = table.patients;
    out.outcome = table.outcome;
    for (std::size_t f = 0; f < table.features.size(); ++f) {
      const auto& col = table.values[f];
      if (std::any_of(col.begin(), col.end(), [](double v) { return std::isnan(v); })) {
        report.dropped.push_back(table.features[f]);
      } else {
        out.features.push_back(table.features[f]);
        out.values.push_back(col);
      }
    }
  }
  if (out.patients.empty() || out.features.empty())
    throw Error(ErrorCode::EverythingDropped, "no data left after dropping missing values");
  return report;
}

}  // namespace radgate::analysis
