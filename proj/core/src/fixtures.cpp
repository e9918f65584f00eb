#include "radgate/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "radgate/csv.hpp"
#include "radgate/dicom_writer.hpp"
#include "radgate/error.hpp"
#include "radgate/fsutil.hpp"
#include "radgate/numfmt.hpp"

namespace radgate::fixtures {

using namespace dicom;

namespace {

constexpr const char* kCtImageStorage = "1.2.840.10008.5.1.4.1.1.2";
constexpr const char* kMrImageStorage = "1.2.840.10008.5.1.4.1.1.4";
constexpr const char* kSecondaryCapture = "1.2.840.10008.5.1.4.1.1.7";
constexpr const char* kRtStructStorage = "1.2.840.10008.5.1.4.1.1.481.3";
constexpr const char* kStudyRootClass = "1.2.840.10008.3.1.2.3.1";

double round_to(double v, double step) {
  const double scale = std::round(1.0 / step);
  return std::round(v * scale) / scale;
}

std::string pick(Rng& rng, std::initializer_list<const char*> options) {
  return *(options.begin() + static_cast<long>(rng.below(options.size())));
}

std::array<double, 3> cross(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

std::string sop_class_for(const std::string& modality) {
  if (modality == "CT") return kCtImageStorage;
  if (modality == "MR") return kMrImageStorage;
  return kSecondaryCapture;
}

std::vector<std::uint8_t> pack_le16(const std::vector<std::uint16_t>& values) {
  std::vector<std::uint8_t> out;
  out.reserve(values.size() * 2);
  for (auto v : values) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
  }
  return out;
}

}  // namespace

double Rng::normal() {
  double u1 = uniform();
  double u2 = uniform();
  if (u1 <= 0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::string make_uid(Rng& rng) { return "2.25." + std::to_string(rng.bits() >> 1); }

DataSet slice_dataset(const SliceMeta& meta, const std::vector<std::uint16_t>& stored) {
  DataSet ds;
  ds.set(text_element(tags::SopClassUid, "UI", sop_class_for(meta.modality)));
  ds.set(text_element(tags::SopInstanceUid, "UI", meta.sop_uid));
  if (meta.series_date) ds.set(text_element(tags::SeriesDate, "DA", *meta.series_date));
  ds.set(text_element(tags::Modality, "CS", meta.modality));
  if (meta.manufacturer) ds.set(text_element(tags::Manufacturer, "LO", *meta.manufacturer));
  if (meta.patient_name) ds.set(text_element(tags::PatientName, "PN", *meta.patient_name));
  ds.set(text_element(tags::PatientId, "LO", meta.patient_id));
  if (meta.slice_thickness) ds.set(decimal_string_element(tags::SliceThickness, std::array{*meta.slice_thickness}));
  if (meta.kvp) ds.set(decimal_string_element(tags::Kvp, std::array{*meta.kvp}));
  if (meta.tube_current) ds.set(integer_string_element(tags::XRayTubeCurrent, std::array{*meta.tube_current}));
  if (meta.exposure) ds.set(integer_string_element(tags::Exposure, std::array{*meta.exposure}));
  if (meta.convolution_kernel) ds.set(text_element(tags::ConvolutionKernel, "SH", *meta.convolution_kernel));
  ds.set(text_element(tags::SeriesInstanceUid, "UI", meta.series_uid));
  if (meta.image_position) ds.set(decimal_string_element(tags::ImagePositionPatient, *meta.image_position));
  if (meta.orientation) ds.set(decimal_string_element(tags::ImageOrientationPatient, *meta.orientation));
  if (meta.rows > 0 && meta.cols > 0) {
    ds.set(us_element(tags::SamplesPerPixel, 1));
    ds.set(text_element(tags::PhotometricInterpretation, "CS", "MONOCHROME2"));
    ds.set(us_element(tags::Rows, static_cast<std::uint16_t>(meta.rows)));
    ds.set(us_element(tags::Columns, static_cast<std::uint16_t>(meta.cols)));
    ds.set(us_element(tags::BitsAllocated, 16));
    ds.set(us_element(tags::BitsStored, 16));
    ds.set(us_element(tags::HighBit, 15));
    ds.set(us_element(tags::PixelRepresentation, 0));
    ds.set(binary_element(tags::PixelData, "OW", pack_le16(stored)));
  }
  if (meta.pixel_spacing) ds.set(decimal_string_element(tags::PixelSpacing, *meta.pixel_spacing));
  if (meta.rescale_intercept) ds.set(decimal_string_element(tags::RescaleIntercept, std::array{*meta.rescale_intercept}));
  if (meta.rescale_slope) ds.set(decimal_string_element(tags::RescaleSlope, std::array{*meta.rescale_slope}));
  return ds;
}

SliceMeta random_slice_meta(Rng& rng) {
  static const std::array<std::array<double, 6>, 5> kOrientations = {{
      {1, 0, 0, 0, 1, 0},
      {1, 0, 0, 0, 0, -1},
      {0, 1, 0, 0, 0, -1},
      {0.6, 0.8, 0, -0.8, 0.6, 0},
      {0.8, 0, 0.6, 0, 1, 0},
  }};
  auto maybe = [&](double probability) { return rng.uniform() < probability; };

  SliceMeta m;
  m.patient_id = "RG" + std::to_string(rng.below(100000));
  if (maybe(0.7)) m.patient_name = pick(rng, {"Doe^Jane", "Roe^Richard", "Moe^A^B", "Synthetic"});
  m.sop_uid = make_uid(rng);
  m.series_uid = make_uid(rng);
  m.modality = pick(rng, {"CT", "MR", "PT", "CT"});
  m.rows = 1 + rng.below(24);
  m.cols = 1 + rng.below(24);
  m.pixel_spacing = std::array{round_to(rng.uniform(0.3, 2.0), 1e-4), round_to(rng.uniform(0.3, 2.0), 1e-4)};
  m.image_position = std::array{round_to(rng.uniform(-300, 300), 1e-3), round_to(rng.uniform(-300, 300), 1e-3),
                                round_to(rng.uniform(-500, 500), 1e-3)};
  m.orientation = kOrientations[rng.below(kOrientations.size())];
  if (maybe(0.8)) m.slice_thickness = round_to(rng.uniform(0.5, 6.0), 0.01);
  if (maybe(0.8)) m.rescale_slope = rng.below(2) ? 1.0 : round_to(rng.uniform(0.1, 3), 0.001);
  if (maybe(0.8)) m.rescale_intercept = round_to(rng.uniform(-1100, 100), 0.5);
  if (maybe(0.7)) m.convolution_kernel = pick(rng, {"STANDARD", "B30f", "LUNG", "FC13"});
  if (maybe(0.7)) m.kvp = static_cast<double>(80 + 20 * rng.below(4));
  if (maybe(0.6)) m.exposure = static_cast<long long>(rng.below(500));
  if (maybe(0.6)) m.tube_current = static_cast<long long>(rng.below(800));
  if (maybe(0.7)) m.series_date = "2024" + std::string(rng.below(2) ? "03" : "11") + std::to_string(10 + rng.below(18));
  if (maybe(0.7)) m.manufacturer = pick(rng, {"Acme Medical", "RadgateSim", "Vendor X"});
  return m;
}

std::string_view defect_name(Defect defect) {
  switch (defect) {
    case Defect::None: return "clean";
    case Defect::WrongModality: return "wrong-modality";
    case Defect::WrongProjection: return "wrong-projection";
    case Defect::MissingSlice: return "missing-slice";
    case Defect::FewSlices: return "few-slices";
    case Defect::BadThickness: return "bad-thickness";
    case Defect::BadSpacing: return "bad-spacing";
    case Defect::BadKernel: return "bad-kernel";
    case Defect::BadResolution: return "bad-resolution";
    case Defect::MissingRescale: return "missing-rescale";
  }
  return "unknown";
}

std::optional<Defect> parse_defect(std::string_view name) {
  if (name == "clean") return Defect::None;
  for (Defect d : kAllDefects)
    if (defect_name(d) == name) return d;
  return std::nullopt;
}

quality::Check defect_check(Defect defect) {
  using quality::Check;
  switch (defect) {
    case Defect::WrongModality: return Check::Modality;
    case Defect::WrongProjection: return Check::Projection;
    case Defect::MissingSlice: return Check::SliceConsistency;
    case Defect::FewSlices: return Check::SliceCount;
    case Defect::BadThickness: return Check::Thickness;
    case Defect::BadSpacing: return Check::Spacing;
    case Defect::BadKernel: return Check::Kernel;
    case Defect::BadResolution: return Check::Resolution;
    case Defect::MissingRescale: return Check::SlopeIntercept;
    case Defect::None: break;
  }
  throw Error(ErrorCode::InvalidParameter, "clean fixture has no defect check");
}

SeriesSpec clean_series(const std::string& patient_id, Rng& rng) {
  SeriesSpec s;
  s.patient_id = patient_id;
  s.patient_name = "Synthetic^" + patient_id;
  s.slices = 16 + rng.below(8);
  static constexpr std::array kThickness{1.25, 2.0, 2.5, 3.0};
  s.thickness = kThickness[rng.below(kThickness.size())];
  s.gap = s.thickness;
  double spacing = round_to(rng.uniform(0.6, 0.95), 0.001);
  s.spacing = {spacing, spacing};
  s.kernel = rng.below(2) ? "STANDARD" : "B30f";
  s.origin = {round_to(rng.uniform(-100, 100), 0.1), round_to(rng.uniform(-100, 100), 0.1),
              round_to(rng.uniform(-200, 0), 0.1)};
  double half_x = 0.5 * spacing * static_cast<double>(s.cols - 1);
  double half_y = 0.5 * spacing * static_cast<double>(s.rows - 1);
  double half_z = 0.5 * s.gap * static_cast<double>(s.slices - 1);
  s.spheres.push_back({{s.origin[0] + half_x + rng.uniform(-2, 2), s.origin[1] + half_y + rng.uniform(-2, 2),
                        s.origin[2] + half_z + rng.uniform(-2, 2)},
                       rng.uniform(4, 7),
                       round_to(rng.uniform(20, 60), 1)});
  s.series_uid = make_uid(rng);
  s.study_uid = make_uid(rng);
  s.frame_uid = make_uid(rng);
  return s;
}

SeriesSpec with_defect(SeriesSpec s, Defect defect) {
  switch (defect) {
    case Defect::None: break;
    case Defect::WrongModality: s.modality = "MR"; break;
    case Defect::WrongProjection: s.orientation = {1, 0, 0, 0, 0, -1}; break;
    case Defect::MissingSlice: s.drop_slice = s.slices / 2; break;
    case Defect::FewSlices: s.slices = 5; break;
    case Defect::BadThickness: s.thickness = 5.0; break;
    case Defect::BadSpacing: s.spacing = {1.5, 1.5}; break;
    case Defect::BadKernel: s.kernel = "LUNG"; break;
    case Defect::BadResolution: s.rows = s.cols = 24; break;
    case Defect::MissingRescale: s.rescale = false; break;
  }
  return s;
}

quality::QualitySpec fixture_quality_spec() {
  quality::QualitySpec q;
  q.target_modality = "CT";
  q.projection = quality::Projection::Axial;
  q.min_slice_count = 10;
  q.thickness_range = quality::Range{1.0, 3.5};
  q.spacing_range = quality::Range{0.5, 1.0};
  q.kernel_whitelist = std::vector<std::string>{"STANDARD", "B30f"};
  q.required_in_plane = std::array<std::size_t, 2>{32, 32};
  return q;
}

std::vector<GeneratedFile> series_files(const SeriesSpec& spec, Rng& rng, const fs::path& dir,
                                        std::vector<std::string>* sop_uids) {
  const std::array<double, 3> row_dir{spec.orientation[0], spec.orientation[1], spec.orientation[2]};
  const std::array<double, 3> col_dir{spec.orientation[3], spec.orientation[4], spec.orientation[5]};
  const auto normal = cross(row_dir, col_dir);
  constexpr double kIntercept = -1024.0;

  std::vector<GeneratedFile> files;
  for (std::size_t k = 0; k < spec.slices; ++k) {
    if (spec.drop_slice && *spec.drop_slice == k) continue;
    SliceMeta m;
    m.patient_id = spec.patient_id;
    m.patient_name = spec.patient_name;
    m.sop_uid = make_uid(rng);
    m.series_uid = spec.series_uid;
    m.modality = spec.modality;
    m.rows = spec.rows;
    m.cols = spec.cols;
    m.pixel_spacing = spec.spacing;
    std::array<double, 3> ipp;
    for (int a = 0; a < 3; ++a) ipp[a] = round_to(spec.origin[a] + static_cast<double>(k) * spec.gap * normal[a], 1e-4);
    m.image_position = ipp;
    m.orientation = spec.orientation;
    m.slice_thickness = spec.thickness;
    if (spec.rescale) {
      m.rescale_slope = 1.0;
      m.rescale_intercept = kIntercept;
    }
    m.convolution_kernel = spec.kernel;
    if (spec.modality == "CT") {
      m.kvp = 120;
      m.exposure = 200;
      m.tube_current = 300;
    }
    m.series_date = "20240115";
    m.manufacturer = "RadgateSim";

    std::vector<std::uint16_t> stored(spec.rows * spec.cols);
    for (std::size_t r = 0; r < spec.rows; ++r)
      for (std::size_t c = 0; c < spec.cols; ++c) {
        std::array<double, 3> p;
        for (int a = 0; a < 3; ++a)
          p[a] = ipp[a] + row_dir[a] * static_cast<double>(c) * spec.spacing[1] +
                 col_dir[a] * static_cast<double>(r) * spec.spacing[0];
        double hu = spec.background_hu;
        for (const auto& sphere : spec.spheres) {
          double d2 = 0;
          for (int a = 0; a < 3; ++a) d2 += (p[a] - sphere.center[a]) * (p[a] - sphere.center[a]);
          if (d2 <= sphere.radius * sphere.radius) hu = sphere.hu;
        }
        hu += spec.noise_hu * rng.normal();
        stored[r * spec.cols + c] = static_cast<std::uint16_t>(std::clamp(std::lround(hu - kIntercept), 0L, 4095L));
      }

    DataSet ds = slice_dataset(m, stored);
    ds.set(text_element(tags::StudyInstanceUid, "UI", spec.study_uid));
    ds.set(integer_string_element(tags::InstanceNumber, std::array{static_cast<long long>(k + 1)}));
    ds.set(text_element(tags::FrameOfReferenceUid, "UI", spec.frame_uid));
    if (sop_uids) sop_uids->push_back(m.sop_uid);

    WriteOptions options;
    if (k % 2 == 1) options.transfer_syntax = TransferSyntax::ImplicitVRLittleEndian;
    char name[32];
    std::snprintf(name, sizeof name, "slice_%03zu.dcm", k);
    files.push_back({dir / name, write_part10(ds, options)});
  }
  return files;
}

GeneratedFile rtstruct_file(const SeriesSpec& spec, const std::vector<RoiShape>& rois, Rng& rng, const fs::path& path) {
  DataSet ds;
  std::string sop_uid = make_uid(rng);
  ds.set(text_element(tags::SopClassUid, "UI", kRtStructStorage));
  ds.set(text_element(tags::SopInstanceUid, "UI", sop_uid));
  ds.set(text_element(tags::SeriesDate, "DA", "20240116"));
  ds.set(text_element(tags::Modality, "CS", "RTSTRUCT"));
  ds.set(text_element(tags::Manufacturer, "LO", "RadgateSim"));
  ds.set(text_element(tags::PatientName, "PN", spec.patient_name));
  ds.set(text_element(tags::PatientId, "LO", spec.patient_id));
  ds.set(text_element(tags::StudyInstanceUid, "UI", spec.study_uid));
  ds.set(text_element(tags::SeriesInstanceUid, "UI", make_uid(rng)));

  DataSet series_item;
  series_item.set(text_element(tags::SeriesInstanceUid, "UI", spec.series_uid));
  DataSet study_item;
  study_item.set(text_element(tags::ReferencedSopClassUid, "UI", kStudyRootClass));
  study_item.set(text_element(tags::ReferencedSopInstanceUid, "UI", spec.study_uid));
  study_item.set(sequence_element(tags::RtReferencedSeriesSequence, {series_item}));
  DataSet frame_item;
  frame_item.set(text_element(tags::FrameOfReferenceUid, "UI", spec.frame_uid));
  frame_item.set(sequence_element(tags::RtReferencedStudySequence, {study_item}));
  ds.set(sequence_element(tags::ReferencedFrameOfReferenceSequence, {frame_item}));

  std::vector<DataSet> roi_items, contour_items;
  for (std::size_t i = 0; i < rois.size(); ++i) {
    const long long number = static_cast<long long>(i + 1);
    DataSet roi;
    roi.set(integer_string_element(tags::RoiNumber, std::array{number}));
    roi.set(text_element(tags::ReferencedFrameOfReferenceUid, "UI", spec.frame_uid));
    roi.set(text_element(tags::RoiName, "LO", rois[i].name));
    roi_items.push_back(std::move(roi));

    std::vector<DataSet> polygons;
    for (const auto& polygon : rois[i].polygons) {
      DataSet contour;
      contour.set(text_element(tags::ContourGeometricType, "CS", "CLOSED_PLANAR"));
      contour.set(integer_string_element(tags::NumberOfContourPoints, std::array{static_cast<long long>(polygon.size())}));
      std::vector<double> data;
      for (const auto& p : polygon) data.insert(data.end(), p.begin(), p.end());
      contour.set(decimal_string_element(tags::ContourData, data));
      polygons.push_back(std::move(contour));
    }
    DataSet item;
    item.set(sequence_element(tags::ContourSequence, std::move(polygons)));
    item.set(integer_string_element(tags::ReferencedRoiNumber, std::array{number}));
    contour_items.push_back(std::move(item));
  }
  ds.set(sequence_element(tags::StructureSetRoiSequence, std::move(roi_items)));
  ds.set(sequence_element(tags::RoiContourSequence, std::move(contour_items)));

  WriteOptions options;
  options.undefined_length_sequences = true;
  return {path, write_part10(ds, options)};
}

namespace {

double slice_z(const SeriesSpec& spec, std::size_t k) {
  return round_to(spec.origin[2] + static_cast<double>(k) * spec.gap, 1e-4);
}

}  // namespace

RoiShape sphere_roi(const SeriesSpec& spec, const Sphere& sphere, std::string name) {
  RoiShape roi{std::move(name), {}};
  constexpr int kVertices = 16;
  for (std::size_t k = 0; k < spec.slices; ++k) {
    double z = slice_z(spec, k);
    double dz = z - sphere.center[2];
    if (std::abs(dz) >= sphere.radius) continue;
    double rho = std::sqrt(sphere.radius * sphere.radius - dz * dz);
    std::vector<std::array<double, 3>> polygon;
    for (int v = 0; v < kVertices; ++v) {
      double theta = 2.0 * std::numbers::pi * v / kVertices;
      polygon.push_back({round_to(sphere.center[0] + rho * std::cos(theta), 1e-4),
                         round_to(sphere.center[1] + rho * std::sin(theta), 1e-4), z});
    }
    roi.polygons.push_back(std::move(polygon));
  }
  return roi;
}

RoiShape square_roi(const SeriesSpec& spec, std::array<double, 2> center, double half, double z0, double z1,
                    std::string name) {
  RoiShape roi{std::move(name), {}};
  for (std::size_t k = 0; k < spec.slices; ++k) {
    double z = slice_z(spec, k);
    if (z < z0 || z > z1) continue;
    roi.polygons.push_back({{center[0] - half, center[1] - half, z},
                            {center[0] + half, center[1] - half, z},
                            {center[0] + half, center[1] + half, z},
                            {center[0] - half, center[1] + half, z}});
  }
  return roi;
}

RoiShape triangle_roi(const SeriesSpec& spec, std::array<double, 2> center, double size, double z0, double z1,
                      std::string name) {
  RoiShape roi{std::move(name), {}};
  for (std::size_t k = 0; k < spec.slices; ++k) {
    double z = slice_z(spec, k);
    if (z < z0 || z > z1) continue;
    roi.polygons.push_back({{center[0] - size / 2, center[1] - size / 3, z},
                            {center[0] + size / 2, center[1] - size / 3, z},
                            {center[0], center[1] + 2 * size / 3, z}});
  }
  return roi;
}

std::optional<Kind> parse_kind(std::string_view name) {
  if (name == "qc") return Kind::Qc;
  if (name == "cohort") return Kind::Cohort;
  if (name == "features") return Kind::Features;
  if (name == "all") return Kind::All;
  return std::nullopt;
}

namespace {

void qc_files(std::uint64_t seed, std::vector<GeneratedFile>& out) {
  Rng rng(seed);
  std::vector<Defect> kinds{Defect::None};
  kinds.insert(kinds.end(), kAllDefects.begin(), kAllDefects.end());
  for (Defect d : kinds) {
    std::string pid(defect_name(d));
    SeriesSpec spec = with_defect(clean_series(pid, rng), d);
    auto files = series_files(spec, rng, fs::path("qc") / "dicom" / pid, nullptr);
    std::move(files.begin(), files.end(), std::back_inserter(out));
  }
  out.push_back({"qc/qc_spec.json", {}});
  std::string json = quality::to_json(fixture_quality_spec());
  out.back().bytes.assign(json.begin(), json.end());
}

GeneratedFile text_file(fs::path path, const std::string& text) {
  return {std::move(path), std::vector<std::uint8_t>(text.begin(), text.end())};
}

void cohort_files(std::uint64_t seed, std::vector<GeneratedFile>& out) {
  Rng rng(seed ^ 0x636f686f7274ULL);
  constexpr std::size_t kPatients = 8;
  CsvWriter clinical;
  clinical.row({"patient", "1yearsurvival", "Overall.Stage", "age"});
  for (std::size_t i = 0; i < kPatients; ++i) {
    char pid[16];
    std::snprintf(pid, sizeof pid, "RG-%03zu", i + 1);
    SeriesSpec spec = clean_series(pid, rng);
    spec.slices = 20;
    spec.thickness = spec.gap = 2.5;
    spec.spacing = {0.75, 0.75};
    spec.kernel = "STANDARD";
    const double cx = spec.origin[0] + 0.75 * 15.5, cy = spec.origin[1] + 0.75 * 15.5;
    const double cz = spec.origin[2] + 2.5 * 9.5;
    // Larger tumours for the positive class so the shape features carry signal.
    bool positive = i % 2 == 1;
    double radius = positive ? rng.uniform(5.5, 7.5) : rng.uniform(3.0, 5.0);
    spec.spheres = {{{cx, cy, cz}, radius, round_to(rng.uniform(20, 60), 1)}};
    fs::path dir = fs::path("cohort") / "dicom" / pid;
    auto files = series_files(spec, rng, dir / "ct");
    std::move(files.begin(), files.end(), std::back_inserter(out));

    std::vector<RoiShape> rois;
    rois.push_back(sphere_roi(spec, spec.spheres[0], "GTV"));
    rois.push_back(square_roi(spec, {cx - 6, cy - 6}, 2.5, cz - 5, cz + 5, "square"));
    rois.push_back(triangle_roi(spec, {cx + 5, cy + 5}, 6.0, cz - 4, cz + 4, "triangle"));
    out.push_back(rtstruct_file(spec, rois, rng, dir / "rtstruct.dcm"));

    clinical.row({pid, positive ? "1" : "0", pick(rng, {"I", "II", "IIIa", "IIIb"}),
                  std::to_string(45 + rng.below(40))});
  }
  out.push_back(text_file("cohort/clinical.csv", clinical.str()));
  out.push_back(text_file("cohort/preprocess.json",
                          "{\n  \"steps\": [\n"
                          "    {\"step\": \"reshape\", \"spacing\": [1.0, 1.0, 2.5], \"interpolation\": \"trilinear\"},\n"
                          "    {\"step\": \"intensity_resample\", \"bin_width\": 25}\n"
                          "  ]\n}\n"));
  out.push_back(text_file("cohort/extraction.json",
                          "{\n  \"discretization\": {\"bin_count\": 16},\n"
                          "  \"features\": [\"firstorder\", \"shape\", \"glcm\"],\n"
                          "  \"glcm_distance\": 1\n}\n"));
}

std::string feature_table(Rng& rng, bool multiclass) {
  constexpr std::size_t kPatients = 100;
  CsvWriter w;
  const char* outcome = multiclass ? kMulticlassOutcome : kBinaryOutcome;
  w.row({"patient", "original_firstorder_Entropy", "original_firstorder_Mean", "original_glcm_Contrast",
         "original_glcm_JointEntropy", "original_shape_Maximum3DDiameter", "original_shape_SurfaceArea",
         "original_shape_VoxelVolume", kPlantedFeature, outcome});
  auto fmt = [](double v) { return format_shortest(round_to(v, 1e-6)); };
  for (std::size_t i = 0; i < kPatients; ++i) {
    char pid[16];
    std::snprintf(pid, sizeof pid, "P%04zu", i + 1);
    bool positive = rng.uniform() < 0.58;
    std::string label = positive ? "1" : "0";
    if (multiclass) {
      double u = rng.uniform();
      label = u < 0.24 ? "I" : u < 0.33 ? "II" : u < 0.56 ? "IIIa" : "IIIb";
      positive = label == "IIIa" || label == "IIIb";
      if (i == kPatients / 2) label.clear();
    }
    double volume = std::exp(rng.normal() * 0.6 + (positive ? 9.0 : 8.0));
    double entropy = 3.0 + (positive ? 0.4 : 0.0) + 0.5 * rng.normal();
    double planted = positive ? rng.uniform(10, 20) : rng.uniform(0, 9.9);
    w.row({pid, fmt(entropy), fmt(30 + 15 * rng.normal()), fmt(std::abs(20 + 8 * rng.normal())),
           fmt(5 + rng.normal()), fmt(2.0 * std::cbrt(volume)),
           fmt(4.84 * std::pow(volume, 2.0 / 3.0) * (1 + 0.05 * rng.normal())), fmt(volume), fmt(planted), label});
  }
  return w.str();
}

void feature_files(std::uint64_t seed, std::vector<GeneratedFile>& out) {
  Rng rng(seed ^ 0x6665617475726573ULL);
  out.push_back(text_file("features/features_binary.csv", feature_table(rng, false)));
  out.push_back(text_file("features/features_multiclass.csv", feature_table(rng, true)));
}

}  // namespace

std::vector<GeneratedFile> generate(Kind kind, std::uint64_t seed) {
  std::vector<GeneratedFile> out;
  if (kind == Kind::Qc || kind == Kind::All) qc_files(seed, out);
  if (kind == Kind::Cohort || kind == Kind::All) cohort_files(seed, out);
  if (kind == Kind::Features || kind == Kind::All) feature_files(seed, out);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.relative < b.relative; });
  return out;
}

void write_files(const std::vector<GeneratedFile>& files, const fs::path& root) {
  for (const auto& f : files) {
    fs::path target = root / f.relative;
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
    if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + target.parent_path().string() + ": " + ec.message());
    write_file_atomic(target, f.bytes);
  }
}

}  // namespace radgate::fixtures
