#include "radgate/volume_build.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "radgate/error.hpp"
#include "radgate/fsutil.hpp"
#include "radgate/numfmt.hpp"

namespace radgate {

BuiltVolume build_volume(const catalog::SeriesRecord& record, std::span<const dicom::PixelGrid> grids) {
  const auto& slices = record.slices;
  if (slices.size() != grids.size())
    throw Error(ErrorCode::InvalidParameter, "pixel grid count does not match slice count");
  if (slices.size() < 2) throw Error(ErrorCode::SingleSlice, "series " + record.series_uid + " has one slice");
  if (auto violation = catalog::series_geometry_violation(record))
    throw Error(ErrorCode::MixedSeriesGeometry, *violation);

  std::vector<std::size_t> order(slices.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return slices[a].position_along_normal() < slices[b].position_along_normal();
  });

  const auto& first = slices[order.front()];
  const auto& o = *first.orientation;
  auto normal = first.normal();

  std::vector<double> gaps;
  for (std::size_t i = 1; i < order.size(); ++i)
    gaps.push_back(slices[order[i]].position_along_normal() - slices[order[i - 1]].position_along_normal());
  std::vector<double> sorted = gaps;
  std::sort(sorted.begin(), sorted.end());
  std::size_t n = sorted.size();
  double median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  if (!(median > 0))
    throw Error(ErrorCode::InvalidParameter, "series " + record.series_uid + " has coincident slices");

  BuiltVolume out;
  for (double g : gaps)
    if (std::abs(g - median) > 1e-3 * median) {
      out.warnings.push_back("NonUniformSpacing: gap " + format_shortest(g) + " mm vs median " +
                             format_shortest(median) + " mm");
      break;
    }

  Geometry geometry;
  geometry.dims = {first.cols, first.rows, slices.size()};
  geometry.spacing = {(*first.pixel_spacing)[1], (*first.pixel_spacing)[0], median};
  geometry.origin = *first.image_position;
  for (int r = 0; r < 3; ++r) {
    geometry.direction[r][0] = o[r];
    geometry.direction[r][1] = o[3 + r];
    geometry.direction[r][2] = normal[r];
  }
  // Renormalize DS-rounded cosines so the geometry invariant holds exactly.
  for (int c = 0; c < 2; ++c) {
    double len = std::sqrt(geometry.direction[0][c] * geometry.direction[0][c] +
                           geometry.direction[1][c] * geometry.direction[1][c] +
                           geometry.direction[2][c] * geometry.direction[2][c]);
    for (int r = 0; r < 3; ++r) geometry.direction[r][c] /= len;
  }

  std::vector<double> voxels(geometry.voxel_count());
  bool integral = true;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  const std::size_t plane = first.rows * first.cols;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& meta = slices[order[k]];
    const auto& grid = grids[order[k]];
    if (grid.rows != first.rows || grid.cols != first.cols || grid.values.size() != plane)
      throw Error(ErrorCode::PixelLengthMismatch, "slice " + meta.sop_uid + " pixel grid size");
    double slope = meta.rescale_slope.value_or(1.0);
    double intercept = meta.rescale_intercept.value_or(0.0);
    for (std::size_t p = 0; p < plane; ++p) {
      double v = grid.values[p] * slope + intercept;
      voxels[k * plane + p] = v;
      integral = integral && v == std::floor(v);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  PixelType type = integral && lo >= -32768 && hi <= 32767 ? PixelType::Int16 : PixelType::Float64;
  std::string unit = record.modality == "CT" ? "HU" : "";
  out.volume = Volume(geometry, std::move(voxels), type, unit);
  return out;
}

BuiltVolume load_series_volume(const std::filesystem::path& root, const catalog::SeriesRecord& record) {
  std::vector<dicom::PixelGrid> grids;
  grids.reserve(record.slice_paths.size());
  for (const auto& path : record.slice_paths) {
    auto obj = dicom::parse_file(read_binary_file(root / path));
    grids.push_back(dicom::decode_pixels(obj));
  }
  return build_volume(record, grids);
}

}  // namespace radgate
