#pragma once

#include <array>
#include <string>
#include <vector>

#include "radgate/dicom.hpp"

namespace radgate::dicom {

using Point3 = std::array<double, 3>;
using Polygon = std::vector<Point3>;

struct ContourSet {
  std::string roi_name;
  std::string referenced_series_uid;
  std::vector<Polygon> planar_contours;

  bool operator==(const ContourSet&) const = default;
};

/// One ContourSet per ROIContourSequence item, in sequence order. Names come
/// from StructureSetROISequence via the ROI number. Polygons with fewer than
/// three points are dropped.
std::vector<ContourSet> parse_rtstruct(const DicomObject& obj);

}  // namespace radgate::dicom
