#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace radgate {

using Vec3 = std::array<double, 3>;
/// Row-major 3x3; column c is the physical direction of index axis c.
using Mat3 = std::array<std::array<double, 3>, 3>;
using Dims = std::array<std::size_t, 3>;

inline constexpr Mat3 kIdentityDirection = {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};

/// Axis-aligned voxel grid placement. Index order is x-fastest.
struct Geometry {
  Dims dims{1, 1, 1};
  Vec3 spacing{1, 1, 1};
  Vec3 origin{0, 0, 0};
  Mat3 direction = kIdentityDirection;

  std::size_t voxel_count() const noexcept { return dims[0] * dims[1] * dims[2]; }
  std::size_t offset(std::size_t i, std::size_t j, std::size_t k) const noexcept {
    return i + dims[0] * (j + dims[1] * k);
  }
  /// origin + direction * diag(spacing) * index
  Vec3 index_to_physical(const Vec3& index) const;
  Vec3 physical_to_index(const Vec3& point) const;

  /// Throws InvalidParameter on non-positive spacing, zero dims, or
  /// direction columns that are not unit-norm within 1e-6.
  void validate() const;

  bool operator==(const Geometry&) const = default;
};

enum class PixelType { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

std::string_view nrrd_type_name(PixelType type);
std::size_t pixel_type_width(PixelType type);

/// Scalar volume. Intensities are held as doubles; pixel_type records the
/// storage type used when the volume is written out.
class Volume {
 public:
  Volume() = default;
  Volume(Geometry geometry, std::vector<double> voxels, PixelType pixel_type = PixelType::Float64,
         std::string intensity_unit = {});

  const Geometry& geometry() const noexcept { return geometry_; }
  const Dims& dims() const noexcept { return geometry_.dims; }
  std::span<const double> voxels() const noexcept { return voxels_; }
  std::span<double> voxels() noexcept { return voxels_; }
  double at(std::size_t i, std::size_t j, std::size_t k) const { return voxels_[geometry_.offset(i, j, k)]; }
  double& at(std::size_t i, std::size_t j, std::size_t k) { return voxels_[geometry_.offset(i, j, k)]; }

  PixelType pixel_type() const noexcept { return pixel_type_; }
  void set_pixel_type(PixelType type) noexcept { pixel_type_ = type; }
  const std::string& intensity_unit() const noexcept { return unit_; }

  bool operator==(const Volume&) const = default;

 private:
  Geometry geometry_;
  std::vector<double> voxels_;
  PixelType pixel_type_ = PixelType::Float64;
  std::string unit_;
};

/// Binary companion grid; voxels are 0 or 1.
class Mask {
 public:
  Mask() = default;
  explicit Mask(Geometry geometry);
  Mask(Geometry geometry, std::vector<std::uint8_t> voxels);

  const Geometry& geometry() const noexcept { return geometry_; }
  const Dims& dims() const noexcept { return geometry_.dims; }
  std::span<const std::uint8_t> voxels() const noexcept { return voxels_; }
  std::span<std::uint8_t> voxels() noexcept { return voxels_; }
  std::uint8_t at(std::size_t i, std::size_t j, std::size_t k) const { return voxels_[geometry_.offset(i, j, k)]; }
  std::uint8_t& at(std::size_t i, std::size_t j, std::size_t k) { return voxels_[geometry_.offset(i, j, k)]; }
  std::size_t count() const noexcept;

  bool operator==(const Mask&) const = default;

 private:
  Geometry geometry_;
  std::vector<std::uint8_t> voxels_;
};

Volume mask_to_volume(const Mask& mask);
/// Voxels > 0.5 become 1. Used when a mask was stored with a wider type.
Mask volume_to_mask(const Volume& volume);

struct IntensityStats {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double std = 0.0;  // population
  std::size_t count = 0;
};

/// Statistics over the whole volume, or over mask voxels when given.
IntensityStats intensity_stats(const Volume& volume, const Mask* mask = nullptr);

}  // namespace radgate
