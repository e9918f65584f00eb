// Acceptance suite: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "helpers.hpp"
#include "oracles.hpp"
#include "radgate/analysis.hpp"
#include "radgate/catalog.hpp"
#include "radgate/dicom_writer.hpp"
#include "radgate/error.hpp"
#include "radgate/features.hpp"
#include "radgate/fixtures.hpp"
#include "radgate/fsutil.hpp"
#include "radgate/nrrd.hpp"
#include "radgate/preprocess.hpp"
#include "radgate/quality.hpp"
#include "radgate/raster.hpp"

using namespace radgate;
namespace fs = std::filesystem;

namespace {

enum class Status { Pass, Fail, Skip };

struct Outcome {
  Status status = Status::Pass;
  std::string detail;
};

Outcome pass(std::string detail) { return {Status::Pass, std::move(detail)}; }
Outcome fail(std::string detail) { return {Status::Fail, std::move(detail)}; }

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// ------------------------------------------------------------------ QC matrix

Outcome qc_defect_matrix() {
  auto start = std::chrono::steady_clock::now();
  std::size_t mismatches = 0, rows_checked = 0;
  std::string first_problem;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    testing::TempDir dir("acc-qc");
    fixtures::write_files(fixtures::generate(fixtures::Kind::Qc, seed), dir.path());
    auto spec = quality::parse_quality_spec(read_text_file(dir.path() / "qc/qc_spec.json"));
    auto scan = catalog::scan_dataset({dir.path() / "qc/dicom"}, 4);
    auto report = quality::quality_check(scan.records, spec, scan.rejected);
    std::map<std::string, const quality::QualityRow*> by_patient;
    for (const auto& row : report.rows) by_patient[row.patient_id] = &row;

    std::vector<fixtures::Defect> kinds{fixtures::Defect::None};
    kinds.insert(kinds.end(), fixtures::kAllDefects.begin(), fixtures::kAllDefects.end());
    for (auto d : kinds) {
      std::string pid(fixtures::defect_name(d));
      auto it = by_patient.find(pid);
      if (it == by_patient.end()) {
        ++mismatches;
        if (first_problem.empty()) first_problem = "seed " + std::to_string(seed) + ": no row for " + pid;
        continue;
      }
      ++rows_checked;
      for (auto check : quality::kAllChecks) {
        bool should_fail = d != fixtures::Defect::None && fixtures::defect_check(d) == check;
        auto expected = should_fail ? quality::Flag::Fail : quality::Flag::Pass;
        if (it->second->flag(check) != expected) {
          ++mismatches;
          if (first_problem.empty())
            first_problem = "seed " + std::to_string(seed) + " " + pid + " check " +
                            std::string(quality::check_name(check));
        }
      }
      if (it->second->overall != (d == fixtures::Defect::None)) ++mismatches;
    }
  }
  double t = seconds_since(start);
  std::string detail = "20 seeds, " + std::to_string(rows_checked) + " series, " + std::to_string(mismatches) +
                       " mismatches, " + fmt(t) + " s";
  if (mismatches) return fail(detail + "; first: " + first_problem);
  if (t >= 10) return fail(detail + " exceeds 10 s");
  return pass(detail);
}

// ---------------------------------------------------------- DICOM round trip

Outcome dicom_round_trip() {
  auto start = std::chrono::steady_clock::now();
  fixtures::Rng rng(20240611);
  std::size_t failures = 0;
  std::string first_problem;
  for (int n = 0; n < 200; ++n) {
    auto meta = fixtures::random_slice_meta(rng);
    std::vector<std::uint16_t> stored(meta.rows * meta.cols);
    for (auto& s : stored) s = static_cast<std::uint16_t>(rng.below(65536));
    dicom::DataSet body = fixtures::slice_dataset(meta, stored);
    std::vector<dicom::DataSet> refs;
    std::size_t items = 1 + rng.below(3);
    for (std::size_t i = 0; i < items; ++i) {
      dicom::DataSet item;
      item.set(dicom::text_element(dicom::tags::ReferencedSopClassUid, "UI", "1.2.840.10008.5.1.4.1.1.2"));
      item.set(dicom::text_element(dicom::tags::ReferencedSopInstanceUid, "UI", fixtures::make_uid(rng)));
      refs.push_back(item);
    }
    body.set(dicom::sequence_element(dicom::tags::ContourImageSequence, refs));

    dicom::WriteOptions options;
    options.transfer_syntax = rng.below(2) ? dicom::TransferSyntax::ImplicitVRLittleEndian
                                           : dicom::TransferSyntax::ExplicitVRLittleEndian;
    options.undefined_length_sequences = rng.below(2) == 1;
    try {
      auto obj = dicom::parse_file(dicom::write_part10(body, options));
      auto back = dicom::extract_slice_meta(obj);
      auto pixels = dicom::decode_pixels(obj);
      const auto* seq = obj.find(dicom::tags::ContourImageSequence);
      bool ok = back == meta && obj.transfer_syntax == options.transfer_syntax && seq && seq->items.size() == items &&
                std::equal(stored.begin(), stored.end(), pixels.values.begin(), pixels.values.end(),
                           [](std::uint16_t a, std::int32_t b) { return static_cast<std::int32_t>(a) == b; });
      for (std::size_t i = 0; ok && i < items; ++i)
        ok = dicom::get_text(seq->items[i], dicom::tags::ReferencedSopInstanceUid) ==
             dicom::get_text(refs[i], dicom::tags::ReferencedSopInstanceUid);
      if (!ok) {
        ++failures;
        if (first_problem.empty()) first_problem = "variant " + std::to_string(n) + " differs";
      }
    } catch (const std::exception& e) {
      ++failures;
      if (first_problem.empty()) first_problem = "variant " + std::to_string(n) + ": " + e.what();
    }
  }
  double t = seconds_since(start);
  std::string detail = "200 variants, " + std::to_string(failures) + " mismatches, " + fmt(t) + " s";
  if (failures) return fail(detail + "; first: " + first_problem);
  if (t >= 5) return fail(detail + " exceeds 5 s");
  return pass(detail);
}

// ------------------------------------------------------------ rasterization

Outcome raster_oracle() {
  fixtures::Rng rng(77);
  std::size_t cases = 0, differing = 0, filled = 0;
  std::string first_problem;
  for (int grid = 0; grid < 3; ++grid) {
    Geometry g;
    g.dims = {24 + rng.below(25), 24 + rng.below(25), 4 + rng.below(7)};
    g.spacing = {rng.uniform(0.5, 1.5), rng.uniform(0.5, 1.5), rng.uniform(1.0, 3.0)};
    g.origin = {rng.uniform(-50, 50), rng.uniform(-50, 50), rng.uniform(-20, 20)};
    const double w = static_cast<double>(g.dims[0]) * g.spacing[0];
    const double h = static_cast<double>(g.dims[1]) * g.spacing[1];
    auto plane = [&] { return g.origin[2] + static_cast<double>(rng.below(g.dims[2])) * g.spacing[2]; };
    auto px = [&](double f) { return g.origin[0] + f * w; };
    auto py = [&](double f) { return g.origin[1] + f * h; };

    std::vector<std::pair<std::string, dicom::ContourSet>> shapes;
    for (int rep = 0; rep < 3; ++rep) {
      double z = plane();
      double cx = rng.uniform(0.3, 0.7), cy = rng.uniform(0.3, 0.7), half = rng.uniform(0.05, 0.25);
      dicom::ContourSet square;
      square.planar_contours.push_back({{px(cx - half), py(cy - half), z},
                                        {px(cx + half), py(cy - half), z},
                                        {px(cx + half), py(cy + half), z},
                                        {px(cx - half), py(cy + half), z}});
      shapes.emplace_back("square", square);

      z = plane();
      dicom::ContourSet triangle;
      triangle.planar_contours.push_back({{px(rng.uniform(0, 1)), py(rng.uniform(0, 1)), z},
                                          {px(rng.uniform(0, 1)), py(rng.uniform(0, 1)), z},
                                          {px(rng.uniform(0, 1)), py(rng.uniform(0, 1)), z}});
      shapes.emplace_back("triangle", triangle);

      z = plane();
      double r = rng.uniform(0.1, 0.3) * std::min(w, h);
      double ox = px(rng.uniform(0.35, 0.65)), oy = py(rng.uniform(0.35, 0.65));
      dicom::ContourSet gon;
      dicom::Polygon poly;
      for (int k = 0; k < 16; ++k) {
        double a = 2 * M_PI * k / 16.0;
        poly.push_back({ox + r * std::cos(a), oy + r * std::sin(a), z});
      }
      gon.planar_contours.push_back(poly);
      shapes.emplace_back("16-gon", gon);
    }
    dicom::ContourSet combined;
    for (const auto& [name, s] : shapes)
      combined.planar_contours.insert(combined.planar_contours.end(), s.planar_contours.begin(), s.planar_contours.end());
    shapes.emplace_back("combined", combined);

    for (const auto& [name, set] : shapes) {
      ++cases;
      auto mask = rasterize(set, g).mask;
      auto expected = oracle::rasterize(set, g);
      filled += mask.count();
      if (!(mask == expected)) {
        ++differing;
        if (first_problem.empty()) first_problem = "grid " + std::to_string(grid) + " " + name;
      }
    }
  }
  std::string detail = std::to_string(cases) + " contour sets on 3 grids, " + std::to_string(filled) +
                       " filled voxels, " + std::to_string(differing) + " differ";
  if (differing) return fail(detail + "; first: " + first_problem);
  if (filled == 0) return fail(detail + "; nothing was filled");
  return pass(detail);
}

// --------------------------------------------------------------- NRRD bit-exact

template <typename Image>
bool bit_exact(const Image& image, std::string& why) {
  auto bytes = nrrd::encode(image);
  auto decoded = nrrd::decode(bytes);
  if (!(decoded.geometry() == image.geometry())) {
    why = "geometry changed";
    return false;
  }
  if constexpr (std::is_same_v<Image, Mask>) {
    auto m = volume_to_mask(decoded);
    if (!(m == image)) {
      why = "mask voxels changed";
      return false;
    }
    if (decoded.pixel_type() != PixelType::UInt8) {
      why = "mask not uint8";
      return false;
    }
    if (nrrd::encode(m) != bytes) {
      why = "mask re-encode differs";
      return false;
    }
  } else {
    if (!(decoded == image)) {
      why = "volume voxels or type changed";
      return false;
    }
    if (nrrd::encode(decoded) != bytes) {
      why = "volume re-encode differs";
      return false;
    }
  }
  return true;
}

Outcome nrrd_round_trip() {
  fixtures::Rng rng(4242);
  testing::TempDir dir("acc-nrrd");
  std::size_t images = 0;
  std::string why;
  for (int trial = 0; trial < 10; ++trial) {
    Geometry g;
    g.dims = {4 + rng.below(13), 4 + rng.below(13), 3 + rng.below(6)};
    g.spacing = {rng.uniform(0.3, 2.0), rng.uniform(0.3, 2.0), rng.uniform(0.5, 5.0)};
    g.origin = {rng.uniform(-300, 300), rng.uniform(-300, 300), rng.uniform(-300, 300)};
    std::vector<double> values(g.voxel_count());
    std::vector<std::uint8_t> mask(g.voxel_count());
    for (std::size_t i = 0; i < values.size(); ++i) {
      values[i] = static_cast<double>(static_cast<long>(rng.below(65536)) - 32768);
      mask[i] = rng.uniform() < 0.4;
    }
    mask[0] = 1;
    Volume v(g, values, PixelType::Int16);
    Mask m(g, mask);
    if (!bit_exact(v, why) || !bit_exact(m, why)) return fail("raw trial " + std::to_string(trial) + ": " + why);
    images += 2;

    nrrd::write(v, dir.path() / "v.nrrd");
    nrrd::write(m, dir.path() / "m.nrrd");
    if (!(nrrd::read(dir.path() / "v.nrrd") == v) || !(nrrd::read_mask(dir.path() / "m.nrrd") == m))
      return fail("file trial " + std::to_string(trial) + " differs");

    std::vector<double> ref_values(g.voxel_count());
    for (auto& x : ref_values) x = rng.uniform(-100, 400);
    auto reference = std::make_shared<const Volume>(g, ref_values);
    preprocess::PreprocessParams params{{
        preprocess::Reshape{Vec3{rng.uniform(0.5, 1.5), rng.uniform(0.5, 1.5), rng.uniform(1, 3)}, std::nullopt,
                            preprocess::Interpolation::Trilinear},
        preprocess::Rescale{-1000, 1000},
        preprocess::ZScore{preprocess::Scope::Roi},
        preprocess::HistMatch{reference, "ref", 256},
        preprocess::HistEqualize{128},
        preprocess::IntensityResample{trial % 2 ? preprocess::BinMode::FixedBinCount : preprocess::BinMode::FixedBinWidth,
                                      trial % 2 ? 64.0 : 5.0},
    }};
    auto chain = preprocess::run_chain(v, params, &m);
    if (chain.volume.pixel_type() != PixelType::Int16) return fail("chain output is not int16");
    if (!chain.mask) return fail("chain dropped the mask");
    if (!bit_exact(chain.volume, why) || !bit_exact(*chain.mask, why))
      return fail("chain trial " + std::to_string(trial) + ": " + why);
    images += 2;
  }
  return pass(std::to_string(images) + " int16/uint8 images, raw and after a 6-step chain");
}

// ------------------------------------------------------------ feature oracle

std::map<std::string, std::optional<double>> library_features(const Volume& v, const Mask& m,
                                                              const features::Discretization& d) {
  std::map<std::string, std::optional<double>> out;
  for (const auto& nv : features::first_order(v, m, d)) out["firstorder_" + nv.name] = nv.value;
  for (const auto& nv : features::shape(m)) out["shape_" + nv.name] = nv.value;
  for (const auto& nv : features::glcm(v, m, d)) out["glcm_" + nv.name] = nv.value;
  return out;
}

std::map<std::string, double> oracle_features(const Volume& v, const Mask& m, const oracle::Discretization& d) {
  std::map<std::string, double> out;
  for (const auto& [k, x] : oracle::first_order(v, m, d)) out["firstorder_" + k] = x;
  for (const auto& [k, x] : oracle::shape(m)) out["shape_" + k] = x;
  for (const auto& [k, x] : oracle::glcm(v, m, d)) out["glcm_" + k] = x;
  return out;
}

struct RandomRoi {
  Volume volume;
  Mask mask;
};

RandomRoi random_roi(fixtures::Rng& rng, bool integer_values) {
  Geometry g;
  g.dims = {2 + rng.below(7), 2 + rng.below(7), 1 + rng.below(8)};
  g.spacing = {rng.uniform(0.4, 2.0), rng.uniform(0.4, 2.0), rng.uniform(0.5, 4.0)};
  std::vector<double> values(g.voxel_count());
  std::vector<std::uint8_t> mask(g.voxel_count());
  double density = rng.uniform(0.3, 0.95);
  for (std::size_t i = 0; i < values.size(); ++i) {
    double x = rng.uniform(-400, 600);
    values[i] = integer_values ? std::round(x) : x;
    mask[i] = rng.uniform() < density;
  }
  mask[rng.below(mask.size())] = 1;
  return {Volume(g, values), Mask(g, mask)};
}

// Empty on agreement, else a description of the first disagreement.
std::string compare_to_oracle(const Volume& v, const Mask& m, const features::Discretization& d) {
  auto lib = library_features(v, m, d);
  auto ref = oracle_features(v, m, {d.mode == preprocess::BinMode::FixedBinCount, d.value});
  if (lib.size() != 25) return "library returned " + std::to_string(lib.size()) + " features";
  for (const auto& [name, value] : lib) {
    auto it = ref.find(name);
    if (it == ref.end()) {
      if (value) return name + " should be missing";
      continue;
    }
    if (!value) return name + " missing, oracle " + fmt(it->second);
    if (!oracle::close(*value, it->second)) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "%s: %.17g vs oracle %.17g", name.c_str(), *value, it->second);
      return buf;
    }
  }
  return {};
}

Outcome feature_oracle() {
  fixtures::Rng rng(5150);
  for (int n = 0; n < 50; ++n) {
    auto roi = random_roi(rng, n % 3 == 0);
    features::Discretization d = n % 2 ? features::Discretization{preprocess::BinMode::FixedBinCount, double(2 + rng.below(31))}
                                       : features::Discretization{preprocess::BinMode::FixedBinWidth, rng.uniform(5, 120)};
    auto problem = compare_to_oracle(roi.volume, roi.mask, d);
    if (!problem.empty()) return fail("ROI " + std::to_string(n) + ": " + problem);
  }

  Geometry g;
  g.dims = {12, 12, 12};
  Mask cube(g);
  for (std::size_t k = 1; k < 11; ++k)
    for (std::size_t j = 1; j < 11; ++j)
      for (std::size_t i = 1; i < 11; ++i) cube.at(i, j, k) = 1;
  std::optional<double> volume, area;
  for (const auto& nv : features::shape(cube)) {
    if (nv.name == "VoxelVolume") volume = nv.value;
    if (nv.name == "SurfaceArea") area = nv.value;
  }
  if (volume != 1000.0 || area != 600.0) return fail("cube volume/area not exactly 1000/600");

  std::vector<int> gray{1, 1, 2, 1, 2, 2, 2, 2, 1};
  auto matrix = features::cooccurrence(gray, Dims{3, 3, 1}, 2, {0, 1, 0});
  std::optional<double> contrast, asm_;
  for (const auto& nv : features::glcm_matrix_features(matrix)) {
    if (nv.name == "Contrast") contrast = nv.value;
    if (nv.name == "AngularSecondMoment") asm_ = nv.value;
  }
  if (contrast != 0.5 || asm_ != 38.0 / 144.0) return fail("GLCM hand case not reproduced exactly");
  return pass("50 random ROIs x 25 features within 1e-9 relative; cube 1000/600 exact; GLCM hand case exact");
}

// ----------------------------------------------------------------- invariance

Volume rotate_z(const Volume& v) {
  Geometry g = v.geometry();
  const auto d = g.dims;
  g.dims = {d[1], d[0], d[2]};
  g.spacing = {v.geometry().spacing[1], v.geometry().spacing[0], v.geometry().spacing[2]};
  Volume out(g, std::vector<double>(g.voxel_count()));
  for (std::size_t k = 0; k < d[2]; ++k)
    for (std::size_t j = 0; j < d[1]; ++j)
      for (std::size_t i = 0; i < d[0]; ++i) out.at(d[1] - 1 - j, i, k) = v.at(i, j, k);
  return out;
}

Mask rotate_z(const Mask& m) { return volume_to_mask(rotate_z(mask_to_volume(m))); }

std::string compare_features(const std::map<std::string, std::optional<double>>& a,
                             const std::map<std::string, std::optional<double>>& b, const std::string& prefix_filter,
                             double tolerance) {
  for (const auto& [name, x] : a) {
    if (!prefix_filter.empty() && name.rfind(prefix_filter, 0) != 0 &&
        name != "firstorder_Entropy" && name != "firstorder_Uniformity")
      continue;
    const auto& y = b.at(name);
    if (x.has_value() != y.has_value()) return name + " presence differs";
    if (x && !oracle::close(*x, *y, tolerance, 1e-12)) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "%s: %.17g vs %.17g", name.c_str(), *x, *y);
      return buf;
    }
  }
  return {};
}

Outcome invariance() {
  fixtures::Rng rng(8080);
  std::size_t comparisons = 0;
  for (int n = 0; n < 30; ++n) {
    auto roi = random_roi(rng, true);
    for (auto d : {features::Discretization{preprocess::BinMode::FixedBinWidth, 25},
                   features::Discretization{preprocess::BinMode::FixedBinCount, 16}}) {
      auto base = library_features(roi.volume, roi.mask, d);
      auto rotated = library_features(rotate_z(roi.volume), rotate_z(roi.mask), d);
      auto problem = compare_features(base, rotated, "", 1e-9);
      if (!problem.empty()) return fail("rotation, ROI " + std::to_string(n) + ": " + problem);
      ++comparisons;
    }

    Volume shifted = roi.volume;
    double c = std::round(rng.uniform(-1000, 1000));
    for (auto& x : shifted.voxels()) x += c;
    features::Discretization fbn{preprocess::BinMode::FixedBinCount, 16};
    auto base = library_features(roi.volume, roi.mask, fbn);
    auto moved = library_features(shifted, roi.mask, fbn);
    for (const char* family : {"shape_", "glcm_"}) {
      auto problem = compare_features(base, moved, family, 1e-9);
      if (!problem.empty()) return fail("shift, ROI " + std::to_string(n) + ": " + problem);
    }
    ++comparisons;

    Geometry g = roi.mask.geometry();
    double unit = *features::shape(roi.mask)[4].value;
    for (double factor : {0.5, 2.0, 3.0, 7.25}) {
      Geometry scaled = g;
      scaled.spacing[2] *= factor;
      Mask m(scaled, std::vector<std::uint8_t>(roi.mask.voxels().begin(), roi.mask.voxels().end()));
      double vol = *features::shape(m)[4].value;
      if (!oracle::close(vol, unit * factor, 1e-12, 0)) return fail("VoxelVolume not linear in sz");
    }
    ++comparisons;
  }
  return pass(std::to_string(comparisons) + " rotation/shift/scaling comparisons within 1e-9");
}

// ----------------------------------------------------------------- statistics

Outcome statistics() {
  auto start = std::chrono::steady_clock::now();
  std::size_t mw_cases = 0;
  double mw_max_diff = 0;
  for (std::size_t n1 = 1; n1 < 10; ++n1)
    for (std::size_t n2 = 1; n1 + n2 <= 10; ++n2)
      for (std::size_t u = 0; u <= n1 * n2; ++u) {
        double lib = analysis::mann_whitney_exact_p(double(u), n1, n2);
        double ref = oracle::mann_whitney_enumerated(double(u), n1, n2);
        mw_max_diff = std::max(mw_max_diff, std::abs(lib - ref));
        ++mw_cases;
      }
  if (mw_max_diff > 1e-15) return fail("exact Mann-Whitney deviates from enumeration by " + fmt(mw_max_diff));

  fixtures::Rng rng(31337);
  for (int n = 0; n < 200; ++n) {
    std::size_t n1 = 1 + rng.below(5), n2 = 1 + rng.below(10 - n1);
    std::vector<double> pool(n1 + n2);
    std::iota(pool.begin(), pool.end(), 1.0);
    for (std::size_t i = pool.size(); i > 1; --i) std::swap(pool[i - 1], pool[rng.below(i)]);
    std::vector<double> a(pool.begin(), pool.begin() + long(n1)), b(pool.begin() + long(n1), pool.end());
    auto r = analysis::mann_whitney_test(a, b);
    if (!r.exact || std::abs(r.p - oracle::mann_whitney_enumerated(r.u, n1, n2)) > 1e-15)
      return fail("mann_whitney_test disagrees with enumeration");
  }
  std::vector<double> a{1, 2, 3}, b{4, 5, 6};
  auto example = analysis::mann_whitney_test(a, b);
  if (example.u != 0 || std::abs(example.p - 0.1) > 1e-15) return fail("A=[1,2,3], B=[4,5,6] does not give p = 0.1");

  double auc_max_diff = 0, ap_max_diff = 0, rho_max_diff = 0, complement_max = 0;
  for (int n = 0; n < 1000; ++n) {
    std::size_t size = 4 + rng.below(80);
    std::vector<double> scores(size), other(size);
    std::vector<bool> labels(size);
    bool coarse = n % 2 == 0;
    for (std::size_t i = 0; i < size; ++i) {
      scores[i] = coarse ? double(rng.below(6)) : rng.uniform(-5, 5);
      other[i] = coarse ? double(rng.below(4)) : rng.uniform(0, 1);
      labels[i] = rng.below(2) == 1;
    }
    labels[0] = true;
    labels[1] = false;
    auto roc = analysis::roc_curve(scores, labels);
    auc_max_diff = std::max(auc_max_diff, std::abs(roc.auc - oracle::auc_pairs(scores, labels)));
    std::vector<bool> flipped(size);
    for (std::size_t i = 0; i < size; ++i) flipped[i] = !labels[i];
    complement_max = std::max(complement_max, std::abs(roc.auc + analysis::roc_curve(scores, flipped).auc - 1.0));
    auto pr = analysis::pr_curve(scores, labels);
    ap_max_diff = std::max(ap_max_diff, std::abs(pr.average_precision - oracle::average_precision(scores, labels)));
    auto rho = analysis::spearman(scores, other);
    if (rho) rho_max_diff = std::max(rho_max_diff, std::abs(*rho - oracle::spearman(scores, other)));
  }
  if (auc_max_diff > 1e-12) return fail("AUC deviates from pair counting by " + fmt(auc_max_diff));
  if (complement_max != 0) return fail("AUC + flipped AUC deviates from 1 by " + fmt(complement_max));
  if (ap_max_diff > 1e-12) return fail("average precision deviates from the step sum by " + fmt(ap_max_diff));
  if (rho_max_diff > 1e-12) return fail("Spearman deviates from rank-then-Pearson by " + fmt(rho_max_diff));

  testing::TempDir dir("acc-stats");
  fixtures::write_files(fixtures::generate(fixtures::Kind::Features, 7), dir.path());
  analysis::LoadOptions options;
  options.outcome_column = fixtures::kBinaryOutcome;
  auto table = analysis::load_file(dir.path() / "features/features_binary.csv", options);
  const double alpha = 0.05, auc_threshold = 0.70, corr_threshold = 0.75;

  bool planted_roc = false;
  for (const auto& row : analysis::univariate_roc(table, auc_threshold, 4)) {
    if (!row.curve) return fail("no ROC for " + row.feature);
    if (row.highlight != (row.curve->auc >= auc_threshold)) return fail("ROC highlight wrong for " + row.feature);
    if (row.feature == fixtures::kPlantedFeature) planted_roc = row.curve->auc == 1.0 && row.highlight;
  }
  if (!planted_roc) return fail("planted feature does not reach AUC 1.0");

  bool planted_mw = false;
  for (const auto& row : analysis::mann_whitney(table, alpha, 4)) {
    if (!row.p_corrected) return fail("no Mann-Whitney p for " + row.feature);
    if (row.highlight != (*row.p_corrected < alpha)) return fail("Mann-Whitney highlight wrong for " + row.feature);
    if (row.feature == fixtures::kPlantedFeature) planted_mw = *row.p_corrected < alpha && row.highlight;
  }
  if (!planted_mw) return fail("planted feature is not significant after correction");

  auto volume = analysis::volume_analysis(table, "original_shape_VoxelVolume", corr_threshold, 4);
  std::size_t highlighted = 0;
  for (const auto& c : volume.correlations) {
    if (!c.abs_rho) continue;
    if (c.highlight != (*c.abs_rho > corr_threshold)) return fail("volume highlight wrong for " + c.feature);
    highlighted += c.highlight;
  }
  if (highlighted < 2) return fail("volume-correlated features are not highlighted");

  double t = seconds_since(start);
  std::string detail = std::to_string(mw_cases) + " exact MW cases, 1000 AUC/AP/Spearman tables, planted signal found, " +
                       fmt(t) + " s";
  if (t >= 30) return fail(detail + " exceeds 30 s");
  return pass(detail);
}

// -------------------------------------------------------------- determinism

std::string run_pipeline(const fs::path& root, const std::string& jobs) {
  std::ostringstream out, err;
  auto step = [&](std::vector<std::string> args) {
    args.push_back("--jobs");
    args.push_back(jobs);
    if (cli::run(args, out, err) != cli::kOk) throw std::runtime_error(args[0] + " failed: " + err.str());
  };
  auto p = [&](const char* rel) { return (root / rel).string(); };
  if (cli::run({"gen-fixtures", "--kind", "all", "--seed", "7", "--out", p("data")}, out, err) != cli::kOk)
    return "gen-fixtures failed";
  try {
    step({"describe", "--root", p("data/cohort/dicom"), "--mode", "ct", "--out", p("out/describe.csv")});
    step({"check", "--root", p("data/qc/dicom"), "--spec", p("data/qc/qc_spec.json"), "--out", p("out/qc.csv")});
    step({"convert", "--root", p("data/cohort/dicom"), "--out", p("out/convert")});
    step({"unroll", "--input", p("out/convert/converted_nrrds"), "--out", p("out/unroll"), "--window", "40,400"});
    step({"preprocess", "--input", p("out/convert/converted_nrrds"), "--params", p("data/cohort/preprocess.json"), "--out",
          p("out/preprocess")});
    step({"extract", "--input", p("out/preprocess/preprocessed_nrrds"), "--params", p("data/cohort/extraction.json"),
          "--out", p("out/features.csv")});
    step({"analyze", "--features", p("out/features.csv"), "--clinical", p("data/cohort/clinical.csv"), "--outcome",
          "1yearsurvival", "--volume", "original_shape_VoxelVolume", "--out", p("out/analysis_cohort")});
    step({"analyze", "--features", p("data/features/features_binary.csv"), "--outcome", "1yearsurvival", "--volume",
          "original_shape_VoxelVolume", "--out", p("out/analysis_binary")});
    step({"analyze", "--features", p("data/features/features_multiclass.csv"), "--outcome", "Overall.Stage",
          "--volume", "original_shape_VoxelVolume", "--classes", "I,IIIb", "--out", p("out/analysis_multiclass")});
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

Outcome determinism() {
  testing::TempDir a("acc-e2e-a"), b("acc-e2e-b");
  if (auto e = run_pipeline(a.path(), "1"); !e.empty()) return fail("run 1: " + e);
  if (auto e = run_pipeline(b.path(), "4"); !e.empty()) return fail("run 2: " + e);
  auto ta = testing::snapshot_tree(a.path());
  auto tb = testing::snapshot_tree(b.path());
  std::size_t svgs = 0;
  for (const auto& [path, bytes] : ta) svgs += path.size() > 4 && path.substr(path.size() - 4) == ".svg";
  if (ta.size() != tb.size()) return fail("file counts differ: " + std::to_string(ta.size()) + " vs " + std::to_string(tb.size()));
  for (std::size_t i = 0; i < ta.size(); ++i) {
    if (ta[i].first != tb[i].first) return fail("file sets differ at " + ta[i].first);
    if (ta[i].second != tb[i].second) return fail("bytes differ in " + ta[i].first);
  }
  if (svgs < 15) return fail("only " + std::to_string(svgs) + " SVGs produced");
  return pass(std::to_string(ta.size()) + " files (" + std::to_string(svgs) + " SVGs) identical across runs with 1 and 4 jobs");
}

// -------------------------------------------------------------- Lung1 (optional)

Outcome lung1() {
  const char* path = std::getenv("RADGATE_LUNG1_CLINICAL");
  if (!path || !fs::exists(path)) return {Status::Skip, "set RADGATE_LUNG1_CLINICAL to a Lung1 clinical CSV to run"};
  const char* column = std::getenv("RADGATE_LUNG1_PATIENT_COLUMN");
  auto doc = parse_csv(read_text_file(path));
  analysis::LoadOptions options;
  options.patient_column = column ? column : "PatientID";
  std::string detail;

  options.outcome_column = "1yearsurvival";
  if (doc.column(options.outcome_column) >= 0) {
    auto s = analysis::class_summary(analysis::load(doc, options));
    if (s.balance.size() != 2 || std::abs(s.balance[0] - 0.42) > 0.01 || std::abs(s.balance[1] - 0.58) > 0.01)
      return fail("1yearsurvival balance differs from 0.42/0.58");
    detail += "binary balance ok; ";
  }
  options.outcome_column = "Overall.Stage";
  auto table = analysis::load(doc, options);
  auto s = analysis::class_summary(table);
  const std::vector<double> shares{0.24, 0.09, 0.23, 0.42, 0.01};
  if (s.balance.size() != shares.size()) return fail("Overall.Stage has " + std::to_string(s.balance.size()) + " classes");
  for (std::size_t i = 0; i < shares.size(); ++i)
    if (std::abs(s.balance[i] - shares[i]) > 0.01) return fail("Overall.Stage share of " + s.labels[i] + " differs");
  if (analysis::handle_nan(table, analysis::Axis::Patients).dropped.size() != 1)
    return fail("handle_nan does not drop exactly one patient");
  return pass(detail + "stage shares ok; one patient dropped");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"qc-defect-matrix", qc_defect_matrix},
      {"dicom-round-trip", dicom_round_trip},
      {"rasterization-oracle", raster_oracle},
      {"nrrd-round-trip", nrrd_round_trip},
      {"feature-oracle", feature_oracle},
      {"feature-invariance", invariance},
      {"statistics-oracles", statistics},
      {"end-to-end-determinism", determinism},
      {"lung1-integration", lung1},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    const char* tag = o.status == Status::Pass ? "PASS" : o.status == Status::Fail ? "FAIL" : "SKIP";
    std::printf("%s %s: %s\n", tag, name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    failures += o.status == Status::Fail;
  }
  return failures ? 1 : 0;
}
