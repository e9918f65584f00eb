#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace radgate {

namespace fs = std::filesystem;

std::vector<std::uint8_t> read_binary_file(const fs::path& path);
std::string read_text_file(const fs::path& path);

/// Writes through a sibling temporary file and renames on success, so a
/// reader never observes a partially written file.
void write_file_atomic(const fs::path& path, std::span<const std::uint8_t> bytes);
void write_file_atomic(const fs::path& path, std::string_view text);

/// Directory-level staging for multi-file outputs. Files are written under a
/// hidden temporary directory next to the destination and only moved into
/// place by commit(); an uncommitted stage is removed on destruction.
class OutputStage {
 public:
  explicit OutputStage(fs::path destination);
  ~OutputStage();

  OutputStage(const OutputStage&) = delete;
  OutputStage& operator=(const OutputStage&) = delete;

  /// Absolute path inside the staging area for a destination-relative path.
  fs::path path(const fs::path& relative) const;
  void write(const fs::path& relative, std::span<const std::uint8_t> bytes);
  void write(const fs::path& relative, std::string_view text);
  void commit();

  const fs::path& destination() const noexcept { return destination_; }

 private:
  fs::path destination_;
  fs::path staging_;
  bool committed_ = false;
};

}  // namespace radgate
