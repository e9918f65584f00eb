#include "radgate/raster.hpp"

#include <algorithm>
#include <cmath>

namespace radgate {

void fill_polygon_even_odd(std::span<const std::array<double, 2>> polygon, Mask& mask, std::size_t k) {
  const auto& dims = mask.dims();
  const std::size_t n = polygon.size();
  if (n < 3) return;

  double ymin = polygon[0][1], ymax = polygon[0][1];
  for (const auto& p : polygon) {
    ymin = std::min(ymin, p[1]);
    ymax = std::max(ymax, p[1]);
  }
  long j0 = std::max(0L, static_cast<long>(std::floor(ymin)));
  long j1 = std::min(static_cast<long>(dims[1]) - 1, static_cast<long>(std::ceil(ymax)));

  std::vector<double> crossings;
  for (long j = j0; j <= j1; ++j) {
    const double py = static_cast<double>(j);
    crossings.clear();
    for (std::size_t a = 0, b = n - 1; a < n; b = a++) {
      const auto& pa = polygon[a];
      const auto& pb = polygon[b];
      if ((pa[1] > py) != (pb[1] > py))
        crossings.push_back((pb[0] - pa[0]) * (py - pa[1]) / (pb[1] - pa[1]) + pa[0]);
    }
    if (crossings.empty()) continue;
    std::sort(crossings.begin(), crossings.end());
    // A center at px is inside when an odd number of crossings lie strictly
    // to its right.
    std::size_t right = crossings.size();
    std::size_t next = 0;
    for (std::size_t i = 0; i < dims[0]; ++i) {
      const double px = static_cast<double>(i);
      while (next < crossings.size() && !(px < crossings[next])) {
        ++next;
        --right;
      }
      if (right % 2 == 1) mask.at(i, static_cast<std::size_t>(j), k) ^= 1;
    }
  }
}

RasterResult rasterize(const dicom::ContourSet& contours, const Geometry& geometry) {
  RasterResult result{Mask(geometry), 0, {}};
  for (const auto& polygon : contours.planar_contours) {
    if (polygon.size() < 3) continue;
    std::vector<std::array<double, 2>> projected;
    projected.reserve(polygon.size());
    double kmin = 0, kmax = 0;
    for (std::size_t p = 0; p < polygon.size(); ++p) {
      Vec3 idx = geometry.physical_to_index(polygon[p]);
      projected.push_back({idx[0], idx[1]});
      kmin = p ? std::min(kmin, idx[2]) : idx[2];
      kmax = p ? std::max(kmax, idx[2]) : idx[2];
    }
    if ((kmax - kmin) * geometry.spacing[2] > 1e-3) {
      ++result.skipped_polygons;
      result.warnings.push_back("non-planar contour in ROI '" + contours.roi_name + "' skipped");
      continue;
    }
    double kc = std::round(0.5 * (kmin + kmax));
    if (kc < 0 || kc >= static_cast<double>(geometry.dims[2])) {
      ++result.skipped_polygons;
      result.warnings.push_back("PlaneOutsideVolume: contour of ROI '" + contours.roi_name + "' at slice index " +
                                std::to_string(static_cast<long>(kc)) + " skipped");
      continue;
    }
    fill_polygon_even_odd(projected, result.mask, static_cast<std::size_t>(kc));
  }
  return result;
}

}  // namespace radgate
