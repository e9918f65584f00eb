#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "radgate/volume.hpp"

namespace radgate::preprocess {

struct Rescale {
  double out_min = 0.0;
  double out_max = 1.0;
};

enum class Scope { Whole, Roi };

struct ZScore {
  Scope scope = Scope::Whole;
};

inline constexpr std::size_t kDefaultMatchLevels = 1024;

struct HistMatch {
  std::shared_ptr<const Volume> reference;
  std::string reference_id;  // echoed in statistics
  std::size_t levels = kDefaultMatchLevels;
};

struct HistEqualize {
  std::size_t bins = 256;
};

enum class BinMode { FixedBinCount, FixedBinWidth };

struct IntensityResample {
  BinMode mode = BinMode::FixedBinCount;
  double value = 32;  // bin count n, or bin width w
};

enum class Interpolation { Trilinear, Nearest };

/// Exactly one of spacing or dims is set.
struct Reshape {
  std::optional<Vec3> spacing;
  std::optional<Dims> dims;
  Interpolation interpolation = Interpolation::Trilinear;
};

/// Reserved for N4 bias field correction; running it raises NotImplemented.
struct BiasFieldCorrection {};

using Step = std::variant<Rescale, ZScore, HistMatch, HistEqualize, IntensityResample, Reshape, BiasFieldCorrection>;

std::string_view step_name(const Step& step);
std::string step_parameters(const Step& step);
/// Throws InvalidParameter when the step's parameter invariants fail.
void validate(const Step& step);

struct PreprocessParams {
  std::vector<Step> steps;
};

/// Parses the JSON form ({"steps": [{"step": "rescale", ...}, ...]}).
/// `load_reference` resolves hist_match reference ids to volumes.
PreprocessParams parse_params(std::string_view json,
                              const std::function<Volume(const std::string&)>& load_reference = {});

Volume rescale(const Volume& v, double out_min, double out_max);
/// Population z-score; statistics over `scope` voxels when given, applied to
/// the whole volume.
Volume zscore(const Volume& v, const Mask* scope = nullptr);
Volume hist_match(const Volume& v, const Volume& reference, std::size_t levels = kDefaultMatchLevels);
Volume hist_equalize(const Volume& v, std::size_t bins);
/// IBSI-style discretization; min/max (or the width anchor) are taken over
/// `scope` when given.
Volume intensity_resample(const Volume& v, BinMode mode, double value, const Mask* scope = nullptr);

Geometry reshape_geometry(const Geometry& g, const Reshape& target);
Volume reshape(const Volume& v, const Reshape& target);
/// Masks are always resampled with nearest neighbour.
Mask reshape(const Mask& m, const Reshape& target);

struct StepStats {
  std::size_t index = 0;  // 1-based
  std::string step;
  std::string parameters;
  IntensityStats input;
  IntensityStats output;
};

struct ChainResult {
  Volume volume;
  std::optional<Mask> mask;
  std::vector<StepStats> stats;
};

/// Applies the steps in order. Errors are rethrown as StepError naming the
/// failing step.
ChainResult run_chain(const Volume& v, const PreprocessParams& params, const Mask* mask = nullptr);

/// CSV log rows for one patient; `with_header` emits the header first.
std::string stats_csv(std::string_view patient_id, const std::vector<StepStats>& stats, bool with_header);

}  // namespace radgate::preprocess
