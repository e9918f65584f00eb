#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "radgate/dicom.hpp"

namespace radgate::dicom {

/// Per-file acquisition metadata. Optional attributes stay empty when the
/// tag is absent; nothing is defaulted.
struct SliceMeta {
  std::string patient_id;
  std::optional<std::string> patient_name;
  std::string sop_uid;
  std::string series_uid;
  std::string modality;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::optional<std::array<double, 2>> pixel_spacing;   // (row mm, col mm)
  std::optional<std::array<double, 3>> image_position;  // patient mm
  std::optional<std::array<double, 6>> orientation;     // row cosines, column cosines
  std::optional<double> slice_thickness;
  std::optional<double> rescale_slope;
  std::optional<double> rescale_intercept;
  std::optional<std::string> convolution_kernel;
  std::optional<double> kvp;
  std::optional<long long> exposure;
  std::optional<long long> tube_current;
  std::optional<std::string> series_date;
  std::optional<std::string> manufacturer;

  /// True when the file carries an image (Rows/PixelData present).
  bool image_bearing() const noexcept { return rows > 0 && cols > 0; }
  /// Unit normal of the slice plane (row cosines x column cosines).
  std::array<double, 3> normal() const;
  /// Projection of image_position onto normal().
  double position_along_normal() const;

  bool operator==(const SliceMeta&) const = default;
};

SliceMeta extract_slice_meta(const DicomObject& obj);

/// Stored pixel values, row-major, no rescale applied.
struct PixelGrid {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::int32_t> values;

  std::int32_t at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

PixelGrid decode_pixels(const DicomObject& obj);

/// Checks the orientation invariants: both cosine triples unit-norm and
/// mutually orthogonal within `tolerance`.
bool orientation_valid(const std::array<double, 6>& cosines, double tolerance = 1e-3);

}  // namespace radgate::dicom
