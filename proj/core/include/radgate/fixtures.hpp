#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "radgate/dicom.hpp"
#include "radgate/quality.hpp"
#include "radgate/slice_meta.hpp"

namespace radgate::fixtures {

namespace fs = std::filesystem;

/// Seeded generator with a fixed mapping from raw engine output, so streams
/// are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }
  double normal();

 private:
  std::mt19937_64 engine_;
};

/// Decimal UID under the 2.25 (UUID-derived) root.
std::string make_uid(Rng& rng);

/// Single-slice dataset carrying exactly the attributes present in `meta`.
dicom::DataSet slice_dataset(const dicom::SliceMeta& meta, const std::vector<std::uint16_t>& stored);

/// Metadata with random but DS-representable values; used for round trips.
dicom::SliceMeta random_slice_meta(Rng& rng);

enum class Defect {
  None,
  WrongModality,
  WrongProjection,
  MissingSlice,
  FewSlices,
  BadThickness,
  BadSpacing,
  BadKernel,
  BadResolution,
  MissingRescale,
};

inline constexpr std::array<Defect, 9> kAllDefects = {
    Defect::WrongModality, Defect::WrongProjection, Defect::MissingSlice, Defect::FewSlices,   Defect::BadThickness,
    Defect::BadSpacing,    Defect::BadKernel,       Defect::BadResolution, Defect::MissingRescale};

std::string_view defect_name(Defect defect);
std::optional<Defect> parse_defect(std::string_view name);
/// The single quality check a defect is built to violate.
quality::Check defect_check(Defect defect);

struct Sphere {
  std::array<double, 3> center;  // patient mm
  double radius;
  double hu;
};

struct SeriesSpec {
  std::string patient_id;
  std::string patient_name;
  std::string modality = "CT";
  std::size_t rows = 32;
  std::size_t cols = 32;
  std::size_t slices = 20;
  double thickness = 2.5;
  double gap = 2.5;
  std::array<double, 2> spacing{0.75, 0.75};
  std::array<double, 6> orientation{1, 0, 0, 0, 1, 0};
  std::array<double, 3> origin{0, 0, 0};
  std::string kernel = "STANDARD";
  bool rescale = true;
  std::optional<std::size_t> drop_slice;
  std::vector<Sphere> spheres;
  double background_hu = -1000;
  double noise_hu = 10;
  std::string series_uid;
  std::string study_uid;
  std::string frame_uid;
};

/// A clean series with seed-dependent acquisition values inside the
/// fixture quality spec.
SeriesSpec clean_series(const std::string& patient_id, Rng& rng);
SeriesSpec with_defect(SeriesSpec spec, Defect defect);

/// Quality spec matched by every clean series.
quality::QualitySpec fixture_quality_spec();

struct GeneratedFile {
  fs::path relative;
  std::vector<std::uint8_t> bytes;
};

/// Slice files named slice_NNN.dcm under `dir`. The SOP instance UIDs are
/// returned through `sop_uids` when given.
std::vector<GeneratedFile> series_files(const SeriesSpec& spec, Rng& rng, const fs::path& dir,
                                        std::vector<std::string>* sop_uids = nullptr);

struct RoiShape {
  std::string name;
  std::vector<std::vector<std::array<double, 3>>> polygons;
};

/// Closed-planar RTSTRUCT referencing the series of `spec`.
GeneratedFile rtstruct_file(const SeriesSpec& spec, const std::vector<RoiShape>& rois, Rng& rng, const fs::path& path);

/// Per-slice 16-gon cross sections of a sphere.
RoiShape sphere_roi(const SeriesSpec& spec, const Sphere& sphere, std::string name);
/// Axis-aligned square of the given half-width on the slices whose z lies in [z0, z1].
RoiShape square_roi(const SeriesSpec& spec, std::array<double, 2> center, double half, double z0, double z1,
                    std::string name);
RoiShape triangle_roi(const SeriesSpec& spec, std::array<double, 2> center, double size, double z0, double z1,
                      std::string name);

enum class Kind { Qc, Cohort, Features, All };

std::optional<Kind> parse_kind(std::string_view name);

/// All files of a fixture kind, sorted by path. Layout:
///   qc/dicom/<patient>/...       clean series plus one per defect
///   qc/qc_spec.json
///   cohort/dicom/<patient>/...   series with an RTSTRUCT (GTV, square, triangle)
///   cohort/clinical.csv, cohort/preprocess.json, cohort/extraction.json
///   features/features_binary.csv, features/features_multiclass.csv
std::vector<GeneratedFile> generate(Kind kind, std::uint64_t seed);

/// Writes generated files below `root` (created as needed).
void write_files(const std::vector<GeneratedFile>& files, const fs::path& root);

/// Column in the binary feature table whose values separate the classes.
inline constexpr const char* kPlantedFeature = "planted_separator";
inline constexpr const char* kBinaryOutcome = "1yearsurvival";
inline constexpr const char* kMulticlassOutcome = "Overall.Stage";

}  // namespace radgate::fixtures
