#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "radgate/volume.hpp"

namespace radgate::nrrd {

/// Serializes an NRRD0004 file with raw little-endian payload. Header fields
/// are emitted in a fixed order: type, dimension, sizes, space, space
/// directions, space origin, endian, encoding. Throws NonRepresentable when
/// a voxel does not fit the volume's pixel type.
std::vector<std::uint8_t> encode(const Volume& volume);
std::vector<std::uint8_t> encode(const Mask& mask);

/// Parses NRRD0001..NRRD0005 with raw or gzip encoding, little endian.
Volume decode(std::span<const std::uint8_t> bytes);

void write(const Volume& volume, const std::filesystem::path& path);
void write(const Mask& mask, const std::filesystem::path& path);
Volume read(const std::filesystem::path& path);
Mask read_mask(const std::filesystem::path& path);

}  // namespace radgate::nrrd
