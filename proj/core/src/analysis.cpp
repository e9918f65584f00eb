#include "radgate/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "radgate/error.hpp"
#include "radgate/numfmt.hpp"
#include "radgate/parallel.hpp"

namespace radgate::analysis {

namespace {

bool present(double v) { return !std::isnan(v); }

struct BinaryView {
  std::string negative, positive;
};

BinaryView require_binary(const FeatureTable& table) {
  auto labels = class_labels(table);
  if (labels.size() != 2)
    throw Error(ErrorCode::NotBinary, "outcome '" + table.outcome_name + "' has " + std::to_string(labels.size()) +
                                          " classes, expected 2");
  return {labels[0], labels[1]};
}

}  // namespace

Histogram distributions(const FeatureTable& table, std::string_view feature, const std::vector<std::string>& classes) {
  auto column = table.column(feature);
  auto labels = class_labels(table);
  std::vector<std::string> selected = classes.empty() ? labels : classes;
  for (const auto& c : selected)
    if (std::find(labels.begin(), labels.end(), c) == labels.end())
      throw Error(ErrorCode::UnknownClass, "no class '" + c + "' in outcome '" + table.outcome_name + "'");

  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t p = 0; p < column.size(); ++p) {
    if (!present(column[p])) continue;
    if (std::find(selected.begin(), selected.end(), table.outcome[p]) == selected.end()) continue;
    lo = std::min(lo, column[p]);
    hi = std::max(hi, column[p]);
  }

  Histogram h;
  h.feature = std::string(feature);
  std::size_t bins = kHistogramBins;
  double width = 1.0, start;
  if (!(lo <= hi)) {
    bins = 1;
    start = 0.0;
  } else if (lo == hi) {
    bins = 1;
    start = lo - 0.5;
  } else {
    width = (hi - lo) / static_cast<double>(bins - 1);
    start = lo - width / 2;
  }
  for (std::size_t b = 0; b <= bins; ++b) h.edges.push_back(start + width * static_cast<double>(b));

  for (const auto& label : selected) {
    HistogramSeries s{label, std::vector<std::size_t>(bins, 0)};
    for (std::size_t p = 0; p < column.size(); ++p) {
      if (table.outcome[p] != label || !present(column[p])) continue;
      double pos = std::floor((column[p] - start) / width);
      auto idx = static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(bins - 1)));
      ++s.counts[idx];
    }
    h.series.push_back(std::move(s));
  }
  return h;
}

std::vector<double> midranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

std::optional<double> spearman(std::span<const double> x, std::span<const double> y) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (!present(x[i]) || !present(y[i])) continue;
    xs.push_back(x[i]);
    ys.push_back(y[i]);
  }
  if (xs.size() < 2) return std::nullopt;
  auto rx = midranks(xs);
  auto ry = midranks(ys);
  const double n = static_cast<double>(rx.size());
  double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    double dx = rx[i] - mx, dy = ry[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0 || syy == 0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CorrelationMatrix spearman_matrix(const FeatureTable& table, unsigned jobs) {
  const std::size_t n = table.features.size();
  CorrelationMatrix m;
  m.names = table.features;
  m.abs_rho.assign(n, std::vector<std::optional<double>>(n));
  parallel_for(n, jobs, [&](std::size_t i) {
    m.abs_rho[i][i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      auto rho = spearman(table.values[i], table.values[j]);
      if (rho) m.abs_rho[i][j] = std::abs(*rho);
    }
  });
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) m.abs_rho[i][j] = m.abs_rho[j][i];
  return m;
}

double mann_whitney_exact_p(double u, std::size_t n1, std::size_t n2) {
  const std::size_t n = n1 + n2;
  const std::size_t max_sum = n * (n + 1) / 2;
  // ways[k][s]: subsets of k ranks drawn from 1..n with rank sum s.
  std::vector<std::vector<double>> ways(n1 + 1, std::vector<double>(max_sum + 1, 0.0));
  ways[0][0] = 1.0;
  for (std::size_t r = 1; r <= n; ++r)
    for (std::size_t k = std::min(r, n1); k >= 1; --k)
      for (std::size_t s = max_sum; s >= r; --s) ways[k][s] += ways[k - 1][s - r];

  const std::size_t offset = n1 * (n1 + 1) / 2;
  double total = 0, lower = 0, upper = 0;
  for (std::size_t s = offset; s <= max_sum; ++s) {
    double w = ways[n1][s];
    if (w == 0) continue;
    double us = static_cast<double>(s - offset);
    total += w;
    if (us <= u) lower += w;
    if (us >= u) upper += w;
  }
  return std::min(1.0, 2.0 * std::min(lower, upper) / total);
}

MannWhitneyResult mann_whitney_test(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::TooFewSamples, "Mann-Whitney needs two nonempty samples");
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  auto ranks = midranks(pooled);
  const double n1 = static_cast<double>(a.size()), n2 = static_cast<double>(b.size());
  double rank_sum = std::accumulate(ranks.begin(), ranks.begin() + static_cast<long>(a.size()), 0.0);

  MannWhitneyResult r;
  r.u = rank_sum - n1 * (n1 + 1) / 2;

  std::vector<double> sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0;
  bool ties = false;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    double t = static_cast<double>(j - i);
    if (t > 1) ties = true;
    tie_term += t * t * t - t;
    i = j;
  }

  if (!ties && pooled.size() <= kExactMannWhitneyLimit) {
    r.exact = true;
    r.p = mann_whitney_exact_p(r.u, a.size(), b.size());
    return r;
  }
  const double n = n1 + n2;
  const double mu = n1 * n2 / 2;
  const double var = n1 * n2 / 12 * ((n + 1) - tie_term / (n * (n - 1)));
  if (!(var > 0)) {
    r.p = 1.0;
    return r;
  }
  double z = (std::abs(r.u - mu) - 0.5) / std::sqrt(var);
  r.p = z <= 0 ? 1.0 : std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return r;
}

double bonferroni(double p, std::size_t tests) { return std::min(1.0, p * static_cast<double>(tests)); }

namespace {

struct Split {
  std::vector<double> negative, positive;
};

Split split_column(const FeatureTable& table, std::span<const double> column, const BinaryView& view) {
  Split s;
  for (std::size_t p = 0; p < column.size(); ++p) {
    if (!present(column[p])) continue;
    if (table.outcome[p] == view.negative)
      s.negative.push_back(column[p]);
    else if (table.outcome[p] == view.positive)
      s.positive.push_back(column[p]);
  }
  return s;
}

void require_class_sizes(const FeatureTable& table, const BinaryView& view) {
  for (const auto& label : {view.negative, view.positive}) {
    auto count = std::count(table.outcome.begin(), table.outcome.end(), label);
    if (count < 2)
      throw Error(ErrorCode::TooFewSamples, "class '" + label + "' has " + std::to_string(count) + " patient(s)");
  }
}

}  // namespace

std::vector<MannWhitneyRow> mann_whitney(const FeatureTable& table, double alpha, unsigned jobs) {
  auto view = require_binary(table);
  require_class_sizes(table, view);
  std::vector<MannWhitneyRow> rows(table.features.size());
  parallel_for(rows.size(), jobs, [&](std::size_t f) {
    rows[f].feature = table.features[f];
    auto s = split_column(table, table.values[f], view);
    if (s.negative.size() >= 2 && s.positive.size() >= 2) rows[f].raw = mann_whitney_test(s.negative, s.positive);
  });
  std::size_t tests = static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.raw.has_value(); }));
  for (auto& r : rows) {
    if (!r.raw) continue;
    r.p_corrected = bonferroni(r.raw->p, tests);
    r.highlight = *r.p_corrected < alpha;
  }
  return rows;
}

namespace {

struct SweepPoint {
  long long tp = 0, fp = 0;
};

// Cumulative counts after each unique score, highest first.
std::vector<SweepPoint> sweep(std::span<const double> scores, const std::vector<bool>& positive, long long& pos,
                              long long& neg) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  pos = std::count(positive.begin(), positive.end(), true);
  neg = static_cast<long long>(positive.size()) - pos;
  if (pos == 0 || neg == 0) throw Error(ErrorCode::TooFewSamples, "curve needs both classes");
  std::vector<SweepPoint> points;
  SweepPoint cur;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (positive[order[i]])
      ++cur.tp;
    else
      ++cur.fp;
    if (i + 1 == order.size() || scores[order[i + 1]] != scores[order[i]]) points.push_back(cur);
  }
  return points;
}

}  // namespace

RocCurve roc_curve(std::span<const double> scores, const std::vector<bool>& positive) {
  long long pos = 0, neg = 0;
  auto points = sweep(scores, positive, pos, neg);
  RocCurve c;
  c.fpr.push_back(0.0);
  c.tpr.push_back(0.0);
  long long twice_area = 0;
  SweepPoint prev;
  for (const auto& pt : points) {
    twice_area += (pt.fp - prev.fp) * (pt.tp + prev.tp);
    c.fpr.push_back(static_cast<double>(pt.fp) / static_cast<double>(neg));
    c.tpr.push_back(static_cast<double>(pt.tp) / static_cast<double>(pos));
    prev = pt;
  }
  c.auc = static_cast<double>(twice_area) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
  return c;
}

PrCurve pr_curve(std::span<const double> scores, const std::vector<bool>& positive) {
  long long pos = 0, neg = 0;
  auto points = sweep(scores, positive, pos, neg);
  PrCurve c;
  c.recall.push_back(0.0);
  c.precision.push_back(1.0);
  long long prev_tp = 0;
  for (const auto& pt : points) {
    double precision = static_cast<double>(pt.tp) / static_cast<double>(pt.tp + pt.fp);
    c.average_precision += static_cast<double>(pt.tp - prev_tp) / static_cast<double>(pos) * precision;
    c.recall.push_back(static_cast<double>(pt.tp) / static_cast<double>(pos));
    c.precision.push_back(precision);
    prev_tp = pt.tp;
  }
  return c;
}

namespace {

void scored_labels(const FeatureTable& table, std::span<const double> column, const BinaryView& view,
                   std::vector<double>& scores, std::vector<bool>& positive) {
  for (std::size_t p = 0; p < column.size(); ++p) {
    if (!present(column[p]) || table.outcome[p].empty()) continue;
    scores.push_back(column[p]);
    positive.push_back(table.outcome[p] == view.positive);
  }
}

}  // namespace

std::vector<RocRow> univariate_roc(const FeatureTable& table, double auc_threshold, unsigned jobs) {
  auto view = require_binary(table);
  std::vector<RocRow> rows(table.features.size());
  parallel_for(rows.size(), jobs, [&](std::size_t f) {
    rows[f].feature = table.features[f];
    std::vector<double> scores;
    std::vector<bool> positive;
    scored_labels(table, table.values[f], view, scores, positive);
    try {
      rows[f].curve = roc_curve(scores, positive);
      rows[f].highlight = rows[f].curve->auc >= auc_threshold;
    } catch (const Error&) {
      rows[f].curve.reset();
    }
  });
  return rows;
}

VolumeAnalysis volume_analysis(const FeatureTable& table, std::string_view volume_feature, double corr_threshold,
                               unsigned jobs) {
  if (!std::binary_search(table.features.begin(), table.features.end(), volume_feature))
    throw Error(ErrorCode::UnknownVolumeFeature, "no volume feature '" + std::string(volume_feature) + "'");
  auto volume = table.column(volume_feature);
  VolumeAnalysis result;
  if (is_binary(table)) {
    auto view = require_binary(table);
    std::vector<double> scores;
    std::vector<bool> positive;
    scored_labels(table, volume, view, scores, positive);
    result.pr = pr_curve(scores, positive);
  }
  result.correlations.resize(table.features.size());
  parallel_for(table.features.size(), jobs, [&](std::size_t f) {
    auto& row = result.correlations[f];
    row.feature = table.features[f];
    auto rho = spearman(table.values[f], volume);
    if (rho) {
      row.abs_rho = std::abs(*rho);
      row.highlight = *row.abs_rho > corr_threshold;
    }
  });
  return result;
}

StatsTable basic_stats(const FeatureTable& table, const std::optional<std::string>& volume_feature, unsigned jobs) {
  StatsTable out;
  out.binary = is_binary(table);
  out.with_volume = volume_feature.has_value();
  std::span<const double> volume;
  if (volume_feature) {
    if (!std::binary_search(table.features.begin(), table.features.end(), *volume_feature))
      throw Error(ErrorCode::UnknownVolumeFeature, "no volume feature '" + *volume_feature + "'");
    volume = table.column(*volume_feature);
  }
  out.rows.resize(table.features.size());
  parallel_for(out.rows.size(), jobs, [&](std::size_t f) {
    StatRow& row = out.rows[f];
    row.feature = table.features[f];
    std::vector<double> xs;
    for (double v : table.values[f])
      if (present(v)) xs.push_back(v);
    row.n_missing = table.values[f].size() - xs.size();
    if (!xs.empty()) {
      const double n = static_cast<double>(xs.size());
      double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
      double ss = 0;
      for (double x : xs) ss += (x - mean) * (x - mean);
      row.mean = mean;
      row.std = std::sqrt(ss / n);
      auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
      row.min = *lo;
      row.max = *hi;
    }
    if (volume_feature) row.volume_spearman = spearman(table.values[f], volume);
  });
  if (out.binary) {
    try {
      auto mw = mann_whitney(table, 0.05, jobs);
      for (std::size_t f = 0; f < mw.size(); ++f) out.rows[f].mw_p_corrected = mw[f].p_corrected;
    } catch (const Error&) {
    }
    auto roc = univariate_roc(table, 0.70, jobs);
    for (std::size_t f = 0; f < roc.size(); ++f)
      if (roc[f].curve) out.rows[f].roc_auc = roc[f].curve->auc;
  }
  return out;
}

std::string StatsTable::to_csv() const {
  auto cell = [](const std::optional<double>& v) { return v ? format_shortest(*v) : std::string(); };
  CsvWriter w;
  std::vector<std::string> header{"feature", "n_missing", "mean", "std", "min", "max"};
  if (binary) {
    header.emplace_back("mw_p_corrected");
    header.emplace_back("roc_auc");
  }
  if (with_volume) header.emplace_back("volume_spearman");
  w.row(header);
  for (const auto& r : rows) {
    std::vector<std::string> cells{r.feature, std::to_string(r.n_missing), cell(r.mean), cell(r.std), cell(r.min),
                                   cell(r.max)};
    if (binary) {
      cells.push_back(cell(r.mw_p_corrected));
      cells.push_back(cell(r.roc_auc));
    }
    if (with_volume) cells.push_back(cell(r.volume_spearman));
    w.row(cells);
  }
  return w.str();
}

}  // namespace radgate::analysis
