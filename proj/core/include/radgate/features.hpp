#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "radgate/preprocess.hpp"
#include "radgate/volume.hpp"

namespace radgate::features {

enum class Family { FirstOrder, Shape, Glcm };

std::string_view family_name(Family family);

struct Discretization {
  preprocess::BinMode mode = preprocess::BinMode::FixedBinWidth;
  double value = 25.0;  // bin width in intensity units, or bin count
};

struct ExtractionParams {
  Discretization discretization;
  std::optional<Vec3> resample_spacing;
  std::vector<Family> families{Family::FirstOrder, Family::Shape, Family::Glcm};
  std::size_t glcm_distance = 1;

  void validate() const;
};

ExtractionParams parse_extraction_params(std::string_view json);

struct NamedValue {
  std::string name;
  std::optional<double> value;  // nullopt = missing

  bool operator==(const NamedValue&) const = default;
};

/// Gray levels of the ROI: 0 outside the mask, 1..Ng inside. Fixed bin
/// width is anchored at the ROI minimum; fixed bin count clamps the maximum
/// into level n.
std::vector<int> discretize(const Volume& v, const Mask& m, const Discretization& d);

/// Mean, Variance, Skewness, Kurtosis (non-excess), Minimum, Maximum,
/// Median, Percentile10, Percentile90, Range, Energy, RootMeanSquared,
/// Entropy, Uniformity; returned alphabetically.
std::vector<NamedValue> first_order(const Volume& v, const Mask& m, const Discretization& d);

/// VoxelVolume, SurfaceArea (exposed faces), SurfaceVolumeRatio,
/// Sphericity, Maximum3DDiameter over the mask's own spacing.
std::vector<NamedValue> shape(const Mask& m);

/// The 13 unique 3-D neighbour directions.
extern const std::array<std::array<int, 3>, 13> kGlcmDirections;

/// Symmetric co-occurrence counts for one offset; levels 1..Ng map to
/// indices 0..Ng-1.
struct CooccurrenceMatrix {
  int levels = 0;
  std::vector<long long> counts;  // levels x levels, row-major, symmetric
  long long total = 0;

  long long at(int i, int j) const { return counts[static_cast<std::size_t>(i * levels + j)]; }
};

CooccurrenceMatrix cooccurrence(std::span<const int> gray, const Dims& dims, int levels,
                                const std::array<int, 3>& offset);

/// Contrast, Dissimilarity, InverseDifferenceMoment, AngularSecondMoment,
/// Correlation, JointEntropy for one matrix (alphabetical). Correlation is
/// missing when the marginal variance is zero.
std::vector<NamedValue> glcm_matrix_features(const CooccurrenceMatrix& m);

/// Mean of the per-direction features over directions with pairs.
std::vector<NamedValue> glcm(const Volume& v, const Mask& m, const Discretization& d, std::size_t distance = 1);

/// Column names for a parameter set: family order first-order, shape, GLCM;
/// alphabetical within a family; prefixed original_<family>_.
std::vector<std::string> feature_columns(const ExtractionParams& params);

struct CaseData {
  std::string patient_id;
  Volume volume;
  Mask mask;
};

struct FeatureRow {
  std::string patient_id;
  std::vector<std::optional<double>> values;  // parallel to columns
  std::string failure;                        // empty on success
};

struct ExtractionTable {
  std::vector<std::string> columns;
  std::vector<FeatureRow> rows;  // sorted by patient id

  std::string to_csv() const;
  std::string failures_csv() const;
};

/// Features for one case, in feature_columns(params) order.
std::vector<std::optional<double>> extract_case(const Volume& v, const Mask& m, const ExtractionParams& params);

/// Runs extraction for `count` cases produced by `load`. Failures (loading
/// or extraction) become all-missing rows with a reason.
ExtractionTable extract(std::size_t count, const std::function<CaseData(std::size_t)>& load,
                        const ExtractionParams& params, unsigned jobs = 1,
                        const std::function<std::string(std::size_t)>& id_of = {});
ExtractionTable extract(const std::vector<CaseData>& cases, const ExtractionParams& params, unsigned jobs = 1);

}  // namespace radgate::features
