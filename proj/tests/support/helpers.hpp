#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "radgate/volume.hpp"

namespace testing {

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

radgate::Volume volume(radgate::Dims dims, std::vector<double> values, radgate::Vec3 spacing = {1, 1, 1});
radgate::Mask full_mask(const radgate::Geometry& g);

/// Relative path -> bytes for every regular file below root.
std::vector<std::pair<std::string, std::string>> snapshot_tree(const std::filesystem::path& root);

}  // namespace testing
