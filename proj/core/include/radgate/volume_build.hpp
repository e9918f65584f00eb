#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "radgate/catalog.hpp"
#include "radgate/slice_meta.hpp"
#include "radgate/volume.hpp"

namespace radgate {

struct BuiltVolume {
  Volume volume;
  std::vector<std::string> warnings;
};

/// Stacks slices into a volume. `grids` is parallel to record.slices (in any
/// order consistent with it); slices are re-sorted along the normal. The
/// z spacing is the median inter-slice distance, not SliceThickness.
BuiltVolume build_volume(const catalog::SeriesRecord& record, std::span<const dicom::PixelGrid> grids);

/// Reads every slice file of the record relative to `root`, decodes its
/// pixels and builds the volume.
BuiltVolume load_series_volume(const std::filesystem::path& root, const catalog::SeriesRecord& record);

}  // namespace radgate
