#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "radgate/csv.hpp"
#include "radgate/fsutil.hpp"

namespace radgate::analysis {

/// Patients x features, with a categorical outcome. Missing feature values
/// are NaN; a missing outcome is the empty string.
struct FeatureTable {
  std::string source;
  std::string outcome_name;
  std::vector<std::string> patients;
  std::vector<std::string> features;             // sorted by name
  std::vector<std::vector<double>> values;       // [feature][patient]
  std::vector<std::string> outcome;              // [patient]

  std::size_t feature_index(std::string_view name) const;  // throws UnknownFeature
  std::span<const double> column(std::string_view name) const { return values[feature_index(name)]; }
};

struct LoadOptions {
  std::string patient_column = "patient";
  std::string outcome_column;
  std::vector<std::string> include;  // empty = all numeric columns
  std::vector<std::string> exclude;
  std::vector<std::string> drop_patients;
};

/// Builds a table from a feature CSV. When the outcome column is not in the
/// feature CSV it is taken from `clinical` (joined on the patient column);
/// patients without a clinical row get a missing outcome. Columns holding
/// any non-numeric cell are not treated as features.
FeatureTable load(const CsvDocument& features, const LoadOptions& options, const CsvDocument* clinical = nullptr);
FeatureTable load_file(const fs::path& features, const LoadOptions& options,
                       const std::optional<fs::path>& clinical = std::nullopt);

/// Labels in lexicographic order with the missing label "" (if any) last;
/// fractions are over all patients.
struct ClassSummary {
  std::vector<std::string> labels;
  std::vector<std::size_t> counts;
  std::vector<double> balance;
};

ClassSummary class_summary(const FeatureTable& table);

/// Non-missing outcome labels, sorted.
std::vector<std::string> class_labels(const FeatureTable& table);

enum class Axis { Patients, Features };

struct NanReport {
  FeatureTable table;
  std::vector<std::string> dropped;
};

NanReport handle_nan(const FeatureTable& table, Axis axis);

inline constexpr std::size_t kHistogramBins = 20;

struct HistogramSeries {
  std::string label;
  std::vector<std::size_t> counts;
};

/// Equal-width bins over the pooled range of the selected classes. Bin
/// centers sit on min + k*w with w = (max - min) / (bins - 1); a constant
/// feature yields one unit-width bin.
struct Histogram {
  std::string feature;
  std::vector<double> edges;  // bins + 1
  std::vector<HistogramSeries> series;
};

Histogram distributions(const FeatureTable& table, std::string_view feature,
                        const std::vector<std::string>& classes = {});

/// Average ranks (1-based), ties share their midrank.
std::vector<double> midranks(std::span<const double> values);

/// Spearman rho over pairwise-complete observations; nullopt when either
/// side is constant or fewer than two pairs remain.
std::optional<double> spearman(std::span<const double> x, std::span<const double> y);

struct CorrelationMatrix {
  std::vector<std::string> names;
  std::vector<std::vector<std::optional<double>>> abs_rho;
};

CorrelationMatrix spearman_matrix(const FeatureTable& table, unsigned jobs = 1);

struct MannWhitneyResult {
  double u = 0;  // statistic of the first sample
  double p = 1;  // two-sided
  bool exact = false;
};

inline constexpr std::size_t kExactMannWhitneyLimit = 25;

MannWhitneyResult mann_whitney_test(std::span<const double> a, std::span<const double> b);

/// Exact two-sided p for tie-free samples of the given sizes.
double mann_whitney_exact_p(double u, std::size_t n1, std::size_t n2);

double bonferroni(double p, std::size_t tests);

struct MannWhitneyRow {
  std::string feature;
  std::optional<MannWhitneyResult> raw;  // nullopt: a class had < 2 values
  std::optional<double> p_corrected;
  bool highlight = false;
};

std::vector<MannWhitneyRow> mann_whitney(const FeatureTable& table, double alpha = 0.05, unsigned jobs = 1);

/// Threshold sweep over unique scores in descending order, starting at (0,0).
struct RocCurve {
  std::vector<double> fpr;
  std::vector<double> tpr;
  double auc = 0;
};

/// Throws TooFewSamples when either class is absent.
RocCurve roc_curve(std::span<const double> scores, const std::vector<bool>& positive);

struct RocRow {
  std::string feature;
  std::optional<RocCurve> curve;  // nullopt: a class has no values
  bool highlight = false;
};

/// Positive class is the lexicographically larger label.
std::vector<RocRow> univariate_roc(const FeatureTable& table, double auc_threshold = 0.70, unsigned jobs = 1);

/// Precision/recall sweep starting at (recall 0, precision 1); average
/// precision is the step sum over recall increments.
struct PrCurve {
  std::vector<double> recall;
  std::vector<double> precision;
  double average_precision = 0;
};

PrCurve pr_curve(std::span<const double> scores, const std::vector<bool>& positive);

struct VolumeCorrelation {
  std::string feature;
  std::optional<double> abs_rho;
  bool highlight = false;
};

struct VolumeAnalysis {
  std::optional<PrCurve> pr;  // only for binary outcomes
  std::vector<VolumeCorrelation> correlations;
};

VolumeAnalysis volume_analysis(const FeatureTable& table, std::string_view volume_feature,
                               double corr_threshold = 0.75, unsigned jobs = 1);

struct StatRow {
  std::string feature;
  std::size_t n_missing = 0;
  std::optional<double> mean, std, min, max;
  std::optional<double> mw_p_corrected;  // binary outcomes only
  std::optional<double> roc_auc;         // binary outcomes only
  std::optional<double> volume_spearman;
};

struct StatsTable {
  bool binary = false;
  bool with_volume = false;
  std::vector<StatRow> rows;

  std::string to_csv() const;
};

StatsTable basic_stats(const FeatureTable& table, const std::optional<std::string>& volume_feature = std::nullopt,
                       unsigned jobs = 1);

/// True when the table has exactly two non-missing outcome labels.
bool is_binary(const FeatureTable& table);

}  // namespace radgate::analysis
