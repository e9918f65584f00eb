#include "radgate/fsutil.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <system_error>

#include "radgate/error.hpp"

namespace radgate {

std::vector<std::uint8_t> read_binary_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::IoFailure, "read failed for " + path.string());
  return bytes;
}

std::string read_text_file(const fs::path& path) {
  auto bytes = read_binary_file(path);
  return std::string(bytes.begin(), bytes.end());
}

void write_file_atomic(const fs::path& path, std::span<const std::uint8_t> bytes) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) {
      out.close();
      fs::remove(tmp, ec);
      throw Error(ErrorCode::IoFailure, "write failed for " + tmp.string());
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::IoFailure, "cannot rename into " + path.string());
  }
}

void write_file_atomic(const fs::path& path, std::string_view text) {
  write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

OutputStage::OutputStage(fs::path destination) : destination_(std::move(destination)) {
  std::error_code ec;
  fs::path parent = fs::absolute(destination_, ec).parent_path();
  fs::create_directories(parent, ec);
  staging_ = parent / ("." + destination_.filename().string() + ".staging");
  fs::remove_all(staging_, ec);
  if (!fs::create_directories(staging_, ec) || ec)
    throw Error(ErrorCode::IoFailure, "cannot create staging directory " + staging_.string());
}

OutputStage::~OutputStage() {
  std::error_code ec;
  fs::remove_all(staging_, ec);
}

fs::path OutputStage::path(const fs::path& relative) const { return staging_ / relative; }

void OutputStage::write(const fs::path& relative, std::span<const std::uint8_t> bytes) {
  write_file_atomic(path(relative), bytes);
}

void OutputStage::write(const fs::path& relative, std::string_view text) {
  write_file_atomic(path(relative), text);
}

void OutputStage::commit() {
  if (committed_) return;
  std::error_code ec;
  fs::create_directories(destination_, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + destination_.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(staging_))
    if (entry.is_regular_file()) files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    fs::path rel = fs::relative(file, staging_);
    fs::path target = destination_ / rel;
    fs::create_directories(target.parent_path(), ec);
    fs::rename(file, target, ec);
    if (ec) {
      fs::copy_file(file, target, fs::copy_options::overwrite_existing, ec);
      if (ec) throw Error(ErrorCode::IoFailure, "cannot move " + rel.string() + " into place");
    }
  }
  committed_ = true;
}

}  // namespace radgate
