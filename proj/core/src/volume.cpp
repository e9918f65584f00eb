#include "radgate/volume.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "radgate/error.hpp"

namespace radgate {

Vec3 Geometry::index_to_physical(const Vec3& index) const {
  Vec3 p = origin;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) p[r] += direction[r][c] * spacing[c] * index[c];
  return p;
}

Vec3 Geometry::physical_to_index(const Vec3& point) const {
  // A = direction * diag(spacing); solve A x = point - origin by the adjugate.
  Mat3 a{};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) a[r][c] = direction[r][c] * spacing[c];
  double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
               a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
               a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  if (det == 0.0) throw Error(ErrorCode::InvalidParameter, "singular volume affine");
  Mat3 inv{};
  inv[0][0] = (a[1][1] * a[2][2] - a[1][2] * a[2][1]) / det;
  inv[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) / det;
  inv[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) / det;
  inv[1][0] = (a[1][2] * a[2][0] - a[1][0] * a[2][2]) / det;
  inv[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) / det;
  inv[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) / det;
  inv[2][0] = (a[1][0] * a[2][1] - a[1][1] * a[2][0]) / det;
  inv[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) / det;
  inv[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) / det;
  Vec3 d{point[0] - origin[0], point[1] - origin[1], point[2] - origin[2]};
  Vec3 out{};
  for (int r = 0; r < 3; ++r) out[r] = inv[r][0] * d[0] + inv[r][1] * d[1] + inv[r][2] * d[2];
  return out;
}

void Geometry::validate() const {
  for (int a = 0; a < 3; ++a) {
    if (dims[a] == 0) throw Error(ErrorCode::InvalidParameter, "zero-sized dimension");
    if (!(spacing[a] > 0.0) || !std::isfinite(spacing[a]))
      throw Error(ErrorCode::InvalidParameter, "spacing must be positive");
    double norm = std::sqrt(direction[0][a] * direction[0][a] + direction[1][a] * direction[1][a] +
                            direction[2][a] * direction[2][a]);
    if (std::abs(norm - 1.0) > 1e-6)
      throw Error(ErrorCode::InvalidParameter, "direction column " + std::to_string(a) + " is not unit-norm");
  }
}

std::string_view nrrd_type_name(PixelType type) {
  switch (type) {
    case PixelType::Int8: return "int8";
    case PixelType::UInt8: return "uint8";
    case PixelType::Int16: return "short";
    case PixelType::UInt16: return "ushort";
    case PixelType::Int32: return "int";
    case PixelType::UInt32: return "uint";
    case PixelType::Float32: return "float";
    case PixelType::Float64: return "double";
  }
  return "double";
}

std::size_t pixel_type_width(PixelType type) {
  switch (type) {
    case PixelType::Int8:
    case PixelType::UInt8: return 1;
    case PixelType::Int16:
    case PixelType::UInt16: return 2;
    case PixelType::Int32:
    case PixelType::UInt32:
    case PixelType::Float32: return 4;
    case PixelType::Float64: return 8;
  }
  return 8;
}

Volume::Volume(Geometry geometry, std::vector<double> voxels, PixelType pixel_type, std::string intensity_unit)
    : geometry_(geometry), voxels_(std::move(voxels)), pixel_type_(pixel_type), unit_(std::move(intensity_unit)) {
  geometry_.validate();
  if (voxels_.size() != geometry_.voxel_count())
    throw Error(ErrorCode::SizeMismatch, "voxel count " + std::to_string(voxels_.size()) +
                                             " does not match dims (" + std::to_string(geometry_.voxel_count()) + ")");
}

Mask::Mask(Geometry geometry) : geometry_(geometry), voxels_(geometry.voxel_count(), 0) { geometry_.validate(); }

Mask::Mask(Geometry geometry, std::vector<std::uint8_t> voxels) : geometry_(geometry), voxels_(std::move(voxels)) {
  geometry_.validate();
  if (voxels_.size() != geometry_.voxel_count())
    throw Error(ErrorCode::SizeMismatch, "mask voxel count does not match dims");
  for (auto& v : voxels_)
    if (v > 1) throw Error(ErrorCode::InvalidParameter, "mask voxels must be 0 or 1");
}

std::size_t Mask::count() const noexcept {
  return static_cast<std::size_t>(std::count(voxels_.begin(), voxels_.end(), std::uint8_t{1}));
}

Volume mask_to_volume(const Mask& mask) {
  std::vector<double> v(mask.voxels().begin(), mask.voxels().end());
  return Volume(mask.geometry(), std::move(v), PixelType::UInt8);
}

Mask volume_to_mask(const Volume& volume) {
  std::vector<std::uint8_t> v(volume.voxels().size());
  std::transform(volume.voxels().begin(), volume.voxels().end(), v.begin(),
                 [](double x) { return static_cast<std::uint8_t>(x > 0.5 ? 1 : 0); });
  return Mask(volume.geometry(), std::move(v));
}

IntensityStats intensity_stats(const Volume& volume, const Mask* mask) {
  IntensityStats s;
  s.min = std::numeric_limits<double>::infinity();
  s.max = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  auto voxels = volume.voxels();
  for (std::size_t i = 0; i < voxels.size(); ++i) {
    if (mask && !mask->voxels()[i]) continue;
    double x = voxels[i];
    s.min = std::min(s.min, x);
    s.max = std::max(s.max, x);
    sum += x;
    ++s.count;
  }
  if (s.count == 0) return IntensityStats{};
  s.mean = sum / static_cast<double>(s.count);
  double ss = 0.0;
  for (std::size_t i = 0; i < voxels.size(); ++i) {
    if (mask && !mask->voxels()[i]) continue;
    double d = voxels[i] - s.mean;
    ss += d * d;
  }
  s.std = std::sqrt(ss / static_cast<double>(s.count));
  return s;
}

}  // namespace radgate
