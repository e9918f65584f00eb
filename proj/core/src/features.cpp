#include "radgate/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>

#include <json.hpp>

#include "radgate/csv.hpp"
#include "radgate/error.hpp"
#include "radgate/numfmt.hpp"
#include "radgate/parallel.hpp"

namespace radgate::features {

std::string_view family_name(Family family) {
  switch (family) {
    case Family::FirstOrder: return "firstorder";
    case Family::Shape: return "shape";
    case Family::Glcm: return "glcm";
  }
  return "unknown";
}

void ExtractionParams::validate() const {
  if (discretization.mode == preprocess::BinMode::FixedBinWidth && !(discretization.value > 0))
    throw Error(ErrorCode::InvalidParameter, "bin width must be > 0");
  if (discretization.mode == preprocess::BinMode::FixedBinCount &&
      !(discretization.value >= 2 && discretization.value == std::floor(discretization.value)))
    throw Error(ErrorCode::InvalidParameter, "bin count must be an integer >= 2");
  if (families.empty()) throw Error(ErrorCode::InvalidParameter, "no feature families selected");
  if (glcm_distance < 1) throw Error(ErrorCode::InvalidParameter, "GLCM distance must be >= 1");
  if (resample_spacing)
    for (double s : *resample_spacing)
      if (!(s > 0)) throw Error(ErrorCode::InvalidParameter, "resample spacing must be > 0");
}

ExtractionParams parse_extraction_params(std::string_view text) {
  using nlohmann::json;
  auto invalid = [](const std::string& field, const std::string& why) -> void {
    throw Error(ErrorCode::ConfigInvalid, field + ": " + why);
  };
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    invalid("<document>", e.what());
  }
  if (!doc.is_object()) invalid("<document>", "expected an object");

  ExtractionParams params;
  for (const auto& [key, value] : doc.items()) {
    if (key == "discretization") {
      if (!value.is_object() || value.size() != 1) invalid(key, "expected {\"bin_width\": w} or {\"bin_count\": n}");
      if (value.contains("bin_width") && value["bin_width"].is_number())
        params.discretization = {preprocess::BinMode::FixedBinWidth, value["bin_width"].get<double>()};
      else if (value.contains("bin_count") && value["bin_count"].is_number())
        params.discretization = {preprocess::BinMode::FixedBinCount, value["bin_count"].get<double>()};
      else
        invalid(key, "expected {\"bin_width\": w} or {\"bin_count\": n}");
    } else if (key == "resample_spacing") {
      if (!value.is_array() || value.size() != 3 || !value[0].is_number() || !value[1].is_number() ||
          !value[2].is_number())
        invalid(key, "expected [sx, sy, sz]");
      params.resample_spacing = Vec3{value[0].get<double>(), value[1].get<double>(), value[2].get<double>()};
    } else if (key == "features") {
      if (!value.is_array()) invalid(key, "expected a list of families");
      params.families.clear();
      for (const auto& f : value) {
        std::string name = f.is_string() ? f.get<std::string>() : "";
        Family family;
        if (name == "firstorder")
          family = Family::FirstOrder;
        else if (name == "shape")
          family = Family::Shape;
        else if (name == "glcm")
          family = Family::Glcm;
        else {
          invalid(key, "unknown family '" + name + "'");
          continue;
        }
        if (std::find(params.families.begin(), params.families.end(), family) == params.families.end())
          params.families.push_back(family);
      }
    } else if (key == "glcm_distance") {
      if (!value.is_number_unsigned()) invalid(key, "expected a positive integer");
      params.glcm_distance = value.get<std::size_t>();
    } else {
      invalid(key, "unknown field");
    }
  }
  try {
    params.validate();
  } catch (const Error& e) {
    invalid("<document>", e.what());
  }
  return params;
}

namespace {

void require_pair(const Volume& v, const Mask& m) {
  if (!(v.geometry() == m.geometry())) throw Error(ErrorCode::GeometryMismatch, "mask geometry differs from the volume");
  if (m.count() == 0) throw Error(ErrorCode::EmptyMask, "mask has no voxels");
}

std::vector<double> roi_values(const Volume& v, const Mask& m) {
  std::vector<double> out;
  auto voxels = v.voxels();
  auto mask = m.voxels();
  for (std::size_t i = 0; i < voxels.size(); ++i)
    if (mask[i]) out.push_back(voxels[i]);
  return out;
}

double percentile(const std::vector<double>& sorted, double q) {
  double pos = q * static_cast<double>(sorted.size() - 1);
  auto lo = static_cast<std::size_t>(std::floor(pos));
  double frac = pos - static_cast<double>(lo);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

std::vector<int> discretize(const Volume& v, const Mask& m, const Discretization& d) {
  require_pair(v, m);
  auto values = roi_values(v, m);
  auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  double lo = *lo_it, hi = *hi_it;
  std::vector<int> gray(v.voxels().size(), 0);
  auto voxels = v.voxels();
  auto mask = m.voxels();
  for (std::size_t i = 0; i < voxels.size(); ++i) {
    if (!mask[i]) continue;
    double x = voxels[i];
    double level;
    if (d.mode == preprocess::BinMode::FixedBinWidth) {
      level = std::floor((x - lo) / d.value) + 1.0;
    } else {
      level = hi > lo ? std::clamp(std::floor(d.value * (x - lo) / (hi - lo)) + 1.0, 1.0, d.value) : 1.0;
    }
    gray[i] = static_cast<int>(level);
  }
  return gray;
}

std::vector<NamedValue> first_order(const Volume& v, const Mask& m, const Discretization& d) {
  require_pair(v, m);
  auto x = roi_values(v, m);
  const double n = static_cast<double>(x.size());

  double sum = 0, sum_sq = 0;
  for (double xi : x) {
    sum += xi;
    sum_sq += xi * xi;
  }
  double mean = sum / n;
  double m2 = 0, m3 = 0, m4 = 0;
  for (double xi : x) {
    double dx = xi - mean;
    m2 += dx * dx;
    m3 += dx * dx * dx;
    m4 += dx * dx * dx * dx;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  // A flat ROI has no defined shape moments; report 0 like common extractors.
  double skewness = m2 > 0 ? m3 / std::pow(m2, 1.5) : 0.0;
  double kurtosis = m2 > 0 ? m4 / (m2 * m2) : 0.0;

  std::vector<double> sorted = x;
  std::sort(sorted.begin(), sorted.end());

  auto gray = discretize(v, m, d);
  std::map<int, double> histogram;
  for (std::size_t i = 0; i < gray.size(); ++i)
    if (m.voxels()[i]) histogram[gray[i]] += 1.0;
  double entropy = 0, uniformity = 0;
  for (const auto& [level, count] : histogram) {
    double p = count / n;
    entropy -= p * std::log2(p);
    uniformity += p * p;
  }
  if (entropy == 0.0) entropy = 0.0;

  std::vector<NamedValue> out{
      {"Energy", sum_sq},
      {"Entropy", entropy},
      {"Kurtosis", kurtosis},
      {"Maximum", sorted.back()},
      {"Mean", mean},
      {"Median", percentile(sorted, 0.5)},
      {"Minimum", sorted.front()},
      {"Percentile10", percentile(sorted, 0.1)},
      {"Percentile90", percentile(sorted, 0.9)},
      {"Range", sorted.back() - sorted.front()},
      {"RootMeanSquared", std::sqrt(sum_sq / n)},
      {"Skewness", skewness},
      {"Uniformity", uniformity},
      {"Variance", m2},
  };
  return out;
}

std::vector<NamedValue> shape(const Mask& m) {
  if (m.count() == 0) throw Error(ErrorCode::EmptyMask, "mask has no voxels");
  const auto& d = m.dims();
  const auto& s = m.geometry().spacing;
  const std::array<double, 3> face_area{s[1] * s[2], s[0] * s[2], s[0] * s[1]};

  auto inside = [&](long i, long j, long k) {
    if (i < 0 || j < 0 || k < 0 || i >= static_cast<long>(d[0]) || j >= static_cast<long>(d[1]) ||
        k >= static_cast<long>(d[2]))
      return false;
    return m.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j), static_cast<std::size_t>(k)) != 0;
  };

  std::size_t count = 0;
  std::array<std::size_t, 3> exposed{0, 0, 0};
  for (std::size_t k = 0; k < d[2]; ++k)
    for (std::size_t j = 0; j < d[1]; ++j)
      for (std::size_t i = 0; i < d[0]; ++i) {
        if (!m.at(i, j, k)) continue;
        ++count;
        long li = static_cast<long>(i), lj = static_cast<long>(j), lk = static_cast<long>(k);
        exposed[0] += !inside(li - 1, lj, lk) + !inside(li + 1, lj, lk);
        exposed[1] += !inside(li, lj - 1, lk) + !inside(li, lj + 1, lk);
        exposed[2] += !inside(li, lj, lk - 1) + !inside(li, lj, lk + 1);
      }

  double volume = static_cast<double>(count) * s[0] * s[1] * s[2];
  double area = static_cast<double>(exposed[0]) * face_area[0] + static_cast<double>(exposed[1]) * face_area[1] +
                static_cast<double>(exposed[2]) * face_area[2];

  // Farthest pairs lie on the convex hull, and a hull vertex is extreme along
  // every grid line through it; filter to those voxels before the pair scan.
  const long nx = static_cast<long>(d[0]), ny = static_cast<long>(d[1]), nz = static_cast<long>(d[2]);
  std::vector<long> min_i(d[1] * d[2], nx), max_i(d[1] * d[2], -1);
  std::vector<long> min_j(d[0] * d[2], ny), max_j(d[0] * d[2], -1);
  std::vector<long> min_k(d[0] * d[1], nz), max_k(d[0] * d[1], -1);
  for (long k = 0; k < nz; ++k)
    for (long j = 0; j < ny; ++j)
      for (long i = 0; i < nx; ++i) {
        if (!inside(i, j, k)) continue;
        auto jk = static_cast<std::size_t>(j + ny * k), ik = static_cast<std::size_t>(i + nx * k),
             ij = static_cast<std::size_t>(i + nx * j);
        min_i[jk] = std::min(min_i[jk], i);
        max_i[jk] = std::max(max_i[jk], i);
        min_j[ik] = std::min(min_j[ik], j);
        max_j[ik] = std::max(max_j[ik], j);
        min_k[ij] = std::min(min_k[ij], k);
        max_k[ij] = std::max(max_k[ij], k);
      }
  std::vector<std::array<double, 3>> candidates;
  for (long k = 0; k < nz; ++k)
    for (long j = 0; j < ny; ++j)
      for (long i = 0; i < nx; ++i) {
        if (!inside(i, j, k)) continue;
        auto jk = static_cast<std::size_t>(j + ny * k), ik = static_cast<std::size_t>(i + nx * k),
             ij = static_cast<std::size_t>(i + nx * j);
        bool ext_i = i == min_i[jk] || i == max_i[jk];
        bool ext_j = j == min_j[ik] || j == max_j[ik];
        bool ext_k = k == min_k[ij] || k == max_k[ij];
        if (ext_i && ext_j && ext_k)
          candidates.push_back({static_cast<double>(i) * s[0], static_cast<double>(j) * s[1],
                                static_cast<double>(k) * s[2]});
      }
  double best_sq = 0;
  for (std::size_t a = 0; a < candidates.size(); ++a)
    for (std::size_t b = a + 1; b < candidates.size(); ++b) {
      double dx = candidates[a][0] - candidates[b][0];
      double dy = candidates[a][1] - candidates[b][1];
      double dz = candidates[a][2] - candidates[b][2];
      best_sq = std::max(best_sq, dx * dx + dy * dy + dz * dz);
    }

  double sphericity = std::cbrt(36.0 * std::numbers::pi * volume * volume) / area;
  return {
      {"Maximum3DDiameter", std::sqrt(best_sq)},
      {"Sphericity", sphericity},
      {"SurfaceArea", area},
      {"SurfaceVolumeRatio", area / volume},
      {"VoxelVolume", volume},
  };
}

const std::array<std::array<int, 3>, 13> kGlcmDirections = {{
    {1, 0, 0},
    {0, 1, 0},
    {0, 0, 1},
    {1, 1, 0},
    {1, -1, 0},
    {1, 0, 1},
    {1, 0, -1},
    {0, 1, 1},
    {0, 1, -1},
    {1, 1, 1},
    {1, 1, -1},
    {1, -1, 1},
    {1, -1, -1},
}};

CooccurrenceMatrix cooccurrence(std::span<const int> gray, const Dims& dims, int levels,
                                const std::array<int, 3>& offset) {
  CooccurrenceMatrix m;
  m.levels = levels;
  m.counts.assign(static_cast<std::size_t>(levels * levels), 0);
  const long nx = static_cast<long>(dims[0]), ny = static_cast<long>(dims[1]), nz = static_cast<long>(dims[2]);
  for (long k = 0; k < nz; ++k) {
    long k2 = k + offset[2];
    if (k2 < 0 || k2 >= nz) continue;
    for (long j = 0; j < ny; ++j) {
      long j2 = j + offset[1];
      if (j2 < 0 || j2 >= ny) continue;
      for (long i = 0; i < nx; ++i) {
        long i2 = i + offset[0];
        if (i2 < 0 || i2 >= nx) continue;
        int a = gray[static_cast<std::size_t>(i + nx * (j + ny * k))];
        int b = gray[static_cast<std::size_t>(i2 + nx * (j2 + ny * k2))];
        if (a <= 0 || b <= 0) continue;
        ++m.counts[static_cast<std::size_t>((a - 1) * levels + (b - 1))];
        ++m.counts[static_cast<std::size_t>((b - 1) * levels + (a - 1))];
        m.total += 2;
      }
    }
  }
  return m;
}

std::vector<NamedValue> glcm_matrix_features(const CooccurrenceMatrix& m) {
  const int ng = m.levels;
  const double total = static_cast<double>(m.total);
  double contrast = 0, dissimilarity = 0, idm = 0, joint_entropy = 0, sum_ij = 0, mu = 0;
  long long sum_sq = 0;
  std::vector<double> marginal(static_cast<std::size_t>(ng), 0.0);
  for (int i = 0; i < ng; ++i)
    for (int j = 0; j < ng; ++j) {
      long long c = m.at(i, j);
      if (c == 0) continue;
      double cd = static_cast<double>(c);
      double diff = static_cast<double>(i - j);
      contrast += cd * diff * diff;
      dissimilarity += cd * std::abs(diff);
      idm += cd / (1.0 + diff * diff);
      sum_sq += c * c;
      double p = cd / total;
      joint_entropy -= p * std::log2(p);
      sum_ij += static_cast<double>(i + 1) * static_cast<double>(j + 1) * p;
      marginal[static_cast<std::size_t>(i)] += p;
    }
  for (int i = 0; i < ng; ++i) mu += static_cast<double>(i + 1) * marginal[static_cast<std::size_t>(i)];
  double var = 0;
  for (int i = 0; i < ng; ++i) {
    double d = static_cast<double>(i + 1) - mu;
    var += d * d * marginal[static_cast<std::size_t>(i)];
  }
  std::optional<double> correlation;
  if (var > 0) correlation = (sum_ij - mu * mu) / var;
  if (joint_entropy == 0.0) joint_entropy = 0.0;
  return {
      {"AngularSecondMoment", static_cast<double>(sum_sq) / (total * total)},
      {"Contrast", contrast / total},
      {"Correlation", correlation},
      {"Dissimilarity", dissimilarity / total},
      {"InverseDifferenceMoment", idm / total},
      {"JointEntropy", joint_entropy},
  };
}

std::vector<NamedValue> glcm(const Volume& v, const Mask& m, const Discretization& d, std::size_t distance) {
  auto gray = discretize(v, m, d);
  int levels = *std::max_element(gray.begin(), gray.end());
  std::vector<NamedValue> mean;
  std::vector<std::size_t> contributions;
  const int dist = static_cast<int>(distance);
  for (const auto& dir : kGlcmDirections) {
    auto matrix = cooccurrence(gray, v.dims(), levels, {dir[0] * dist, dir[1] * dist, dir[2] * dist});
    if (matrix.total == 0) continue;
    auto values = glcm_matrix_features(matrix);
    if (mean.empty()) {
      mean = values;
      contributions.assign(values.size(), 0);
      for (auto& nv : mean) nv.value = 0.0;
    }
    for (std::size_t f = 0; f < values.size(); ++f) {
      if (!values[f].value) continue;
      *mean[f].value += *values[f].value;
      ++contributions[f];
    }
  }
  if (mean.empty()) {
    // No voxel pair at this distance (e.g. a single-voxel ROI).
    return {{"AngularSecondMoment", {}}, {"Contrast", {}},     {"Correlation", {}},
            {"Dissimilarity", {}},       {"InverseDifferenceMoment", {}}, {"JointEntropy", {}}};
  }
  for (std::size_t f = 0; f < mean.size(); ++f) {
    if (contributions[f] == 0 || (levels == 1 && mean[f].name == "Correlation"))
      mean[f].value.reset();
    else
      *mean[f].value /= static_cast<double>(contributions[f]);
  }
  return mean;
}

std::vector<std::string> feature_columns(const ExtractionParams& params) {
  static const std::map<Family, std::vector<std::string>> kNames = {
      {Family::FirstOrder,
       {"Energy", "Entropy", "Kurtosis", "Maximum", "Mean", "Median", "Minimum", "Percentile10", "Percentile90",
        "Range", "RootMeanSquared", "Skewness", "Uniformity", "Variance"}},
      {Family::Shape, {"Maximum3DDiameter", "Sphericity", "SurfaceArea", "SurfaceVolumeRatio", "VoxelVolume"}},
      {Family::Glcm,
       {"AngularSecondMoment", "Contrast", "Correlation", "Dissimilarity", "InverseDifferenceMoment",
        "JointEntropy"}},
  };
  std::vector<std::string> columns;
  for (Family f : {Family::FirstOrder, Family::Shape, Family::Glcm}) {
    if (std::find(params.families.begin(), params.families.end(), f) == params.families.end()) continue;
    for (const auto& name : kNames.at(f)) columns.push_back("original_" + std::string(family_name(f)) + "_" + name);
  }
  return columns;
}

std::vector<std::optional<double>> extract_case(const Volume& volume, const Mask& mask, const ExtractionParams& params) {
  params.validate();
  const Volume* v = &volume;
  const Mask* m = &mask;
  Volume resampled_volume;
  Mask resampled_mask;
  if (!(volume.geometry() == mask.geometry()))
    throw Error(ErrorCode::GeometryMismatch, "mask geometry differs from the volume");
  if (params.resample_spacing) {
    preprocess::Reshape target{*params.resample_spacing, std::nullopt, preprocess::Interpolation::Trilinear};
    resampled_volume = preprocess::reshape(volume, target);
    resampled_mask = preprocess::reshape(mask, target);
    v = &resampled_volume;
    m = &resampled_mask;
  }
  if (m->count() == 0) throw Error(ErrorCode::EmptyMask, "mask has no voxels");

  std::map<std::string, std::optional<double>> values;
  auto collect = [&](Family f, const std::vector<NamedValue>& named) {
    for (const auto& nv : named) values["original_" + std::string(family_name(f)) + "_" + nv.name] = nv.value;
  };
  for (Family f : params.families) {
    switch (f) {
      case Family::FirstOrder: collect(f, first_order(*v, *m, params.discretization)); break;
      case Family::Shape: collect(f, shape(*m)); break;
      case Family::Glcm: collect(f, glcm(*v, *m, params.discretization, params.glcm_distance)); break;
    }
  }
  std::vector<std::optional<double>> out;
  for (const auto& c : feature_columns(params)) {
    auto value = values.at(c);
    if (value && !std::isfinite(*value)) value.reset();
    out.push_back(value);
  }
  return out;
}

ExtractionTable extract(std::size_t count, const std::function<CaseData(std::size_t)>& load,
                        const ExtractionParams& params, unsigned jobs,
                        const std::function<std::string(std::size_t)>& id_of) {
  params.validate();
  ExtractionTable table;
  table.columns = feature_columns(params);
  table.rows.resize(count);
  parallel_for(count, jobs, [&](std::size_t i) {
    FeatureRow& row = table.rows[i];
    if (id_of) row.patient_id = id_of(i);
    try {
      CaseData data = load(i);
      row.patient_id = data.patient_id;
      row.values = extract_case(data.volume, data.mask, params);
    } catch (const Error& e) {
      row.values.assign(table.columns.size(), std::nullopt);
      row.failure = e.what();
    }
  });
  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [](const auto& a, const auto& b) { return a.patient_id < b.patient_id; });
  return table;
}

ExtractionTable extract(const std::vector<CaseData>& cases, const ExtractionParams& params, unsigned jobs) {
  return extract(
      cases.size(), [&](std::size_t i) { return cases[i]; }, params, jobs,
      [&](std::size_t i) { return cases[i].patient_id; });
}

std::string ExtractionTable::to_csv() const {
  CsvWriter w;
  std::vector<std::string> header{"patient"};
  header.insert(header.end(), columns.begin(), columns.end());
  w.row(header);
  for (const auto& r : rows) {
    std::vector<std::string> cells{r.patient_id};
    for (const auto& v : r.values) cells.push_back(v ? format_shortest(*v) : std::string());
    w.row(cells);
  }
  return w.str();
}

std::string ExtractionTable::failures_csv() const {
  CsvWriter w;
  w.row({"patient", "reason"});
  for (const auto& r : rows)
    if (!r.failure.empty()) w.row({r.patient_id, r.failure});
  return w.str();
}

}  // namespace radgate::features
