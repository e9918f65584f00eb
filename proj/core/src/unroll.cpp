#include "radgate/unroll.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "radgate/error.hpp"

namespace radgate {

std::uint8_t apply_window(double value, const Window& window) {
  if (!(window.width > 0)) return kDegenerateWindowGray;
  double lo = window.level - 0.5 * window.width;
  double scaled = (value - lo) / window.width * 255.0;
  return static_cast<std::uint8_t>(std::clamp(std::round(scaled), 0.0, 255.0));
}

namespace {

bool boundary(const Mask& m, std::size_t i, std::size_t j, std::size_t k) {
  if (!m.at(i, j, k)) return false;
  const auto& d = m.dims();
  if (i == 0 || j == 0 || i + 1 == d[0] || j + 1 == d[1]) return true;
  return !m.at(i - 1, j, k) || !m.at(i + 1, j, k) || !m.at(i, j - 1, k) || !m.at(i, j + 1, k);
}

}  // namespace

std::vector<SliceImage> unroll(const Volume& volume, const Mask* mask, std::optional<Window> window,
                               std::string_view patient_id) {
  if (mask && !(mask->geometry() == volume.geometry()))
    throw Error(ErrorCode::GeometryMismatch, "mask geometry differs from the volume");
  if (!window) {
    auto [lo, hi] = std::minmax_element(volume.voxels().begin(), volume.voxels().end());
    window = Window{0.5 * (*lo + *hi), *hi - *lo};
  }

  const auto& d = volume.dims();
  int digits = std::max(3, static_cast<int>(std::to_string(d[2] - 1).size()));
  std::vector<SliceImage> out;
  out.reserve(d[2]);
  for (std::size_t k = 0; k < d[2]; ++k) {
    char name[64];
    std::snprintf(name, sizeof name, "_slice%0*zu.%s", digits, k, mask ? "ppm" : "pgm");
    SliceImage image;
    image.filename = std::string(patient_id) + name;
    std::string header = std::string(mask ? "P6" : "P5") + "\n" + std::to_string(d[0]) + " " + std::to_string(d[1]) +
                         "\n255\n";
    image.bytes.assign(header.begin(), header.end());
    for (std::size_t j = 0; j < d[1]; ++j) {
      for (std::size_t i = 0; i < d[0]; ++i) {
        std::uint8_t g = apply_window(volume.at(i, j, k), *window);
        if (!mask) {
          image.bytes.push_back(g);
        } else if (boundary(*mask, i, j, k)) {
          image.bytes.insert(image.bytes.end(), {255, 0, 0});
        } else {
          image.bytes.insert(image.bytes.end(), {g, g, g});
        }
      }
    }
    out.push_back(std::move(image));
  }
  return out;
}

}  // namespace radgate
