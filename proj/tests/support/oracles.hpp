#pragma once

// Straight-line reference implementations used to cross-check the library.
// They share no code with it beyond the plain Volume/Mask containers.

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "radgate/rtstruct.hpp"
#include "radgate/volume.hpp"

namespace oracle {

bool inside_even_odd(double px, double py, const std::vector<std::array<double, 2>>& polygon);

/// Even-odd fill of every polygon at voxel centers; polygons on the same
/// plane toggle each other. Assumes an identity direction matrix.
radgate::Mask rasterize(const radgate::dicom::ContourSet& contours, const radgate::Geometry& geometry);

struct Discretization {
  bool fixed_bin_count = false;
  double value = 25;
};

/// Feature name (without the original_<family>_ prefix) to value; a
/// missing value is absent from the map.
std::map<std::string, double> first_order(const radgate::Volume& v, const radgate::Mask& m, Discretization d);
std::map<std::string, double> shape(const radgate::Mask& m);
std::map<std::string, double> glcm(const radgate::Volume& v, const radgate::Mask& m, Discretization d);

/// Two-sided exact Mann-Whitney p by enumerating every assignment of
/// ranks 1..n1+n2 to the first sample.
double mann_whitney_enumerated(double u, std::size_t n1, std::size_t n2);

/// AUC as (correctly ordered pairs + ties/2) / (n_pos * n_neg).
double auc_pairs(const std::vector<double>& scores, const std::vector<bool>& positive);

/// Rank with O(n^2) counting, then Pearson on the ranks.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

/// Average precision by sweeping thresholds from the highest score down.
double average_precision(const std::vector<double>& scores, const std::vector<bool>& positive);

bool close(double a, double b, double rel = 1e-9, double abs_floor = 1e-12);

}  // namespace oracle
