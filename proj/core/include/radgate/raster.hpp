#pragma once

#include <span>
#include <string>
#include <vector>

#include "radgate/rtstruct.hpp"
#include "radgate/volume.hpp"

namespace radgate {

struct RasterResult {
  Mask mask;
  std::size_t skipped_polygons = 0;  // planes outside the grid or non-planar
  std::vector<std::string> warnings;
};

/// Fills each planar contour with the even-odd rule evaluated at voxel
/// centers. Points are mapped to continuous voxel indices through the
/// inverse affine; polygons sharing a plane are XOR-combined so holes work.
RasterResult rasterize(const dicom::ContourSet& contours, const Geometry& geometry);

/// Even-odd fill of one polygon given in continuous (i, j) index space,
/// toggling voxels of plane k. Exposed for tests and benchmarks.
void fill_polygon_even_odd(std::span<const std::array<double, 2>> polygon, Mask& mask, std::size_t k);

}  // namespace radgate
