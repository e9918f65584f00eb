#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "radgate/volume.hpp"

namespace radgate {

struct Window {
  double level = 0.0;
  double width = 0.0;
};

struct SliceImage {
  std::string filename;  // <patient>_sliceNNN.ppm (P6) or .pgm (P5) without a mask
  std::vector<std::uint8_t> bytes;
};

inline constexpr std::uint8_t kDegenerateWindowGray = 128;

/// Linear window mapping to 8 bits; a non-positive width maps everything to
/// mid-gray.
std::uint8_t apply_window(double value, const Window& window);

/// Exports every axial slice as a binary portable pixmap. Mask boundary
/// voxels (mask 1 with an in-plane 4-neighbour 0 or outside the grid) are
/// painted pure red. The default window spans the volume's min..max.
std::vector<SliceImage> unroll(const Volume& volume, const Mask* mask, std::optional<Window> window,
                               std::string_view patient_id);

}  // namespace radgate
