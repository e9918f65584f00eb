#include "helpers.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>

#include <unistd.h>

namespace testing {

namespace fs = std::filesystem;

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          ("radgate-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

radgate::Volume volume(radgate::Dims dims, std::vector<double> values, radgate::Vec3 spacing) {
  radgate::Geometry g;
  g.dims = dims;
  g.spacing = spacing;
  return radgate::Volume(g, std::move(values));
}

radgate::Mask full_mask(const radgate::Geometry& g) {
  return radgate::Mask(g, std::vector<std::uint8_t>(g.voxel_count(), 1));
}

std::vector<std::pair<std::string, std::string>> snapshot_tree(const fs::path& root) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream bytes;
    bytes << in.rdbuf();
    out.emplace_back(fs::relative(entry.path(), root).generic_string(), bytes.str());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace testing
