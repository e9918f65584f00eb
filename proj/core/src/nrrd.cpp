#include "radgate/nrrd.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <sstream>
#include <string>

#include "radgate/error.hpp"
#include "radgate/fsutil.hpp"
#include "radgate/numfmt.hpp"

namespace radgate::nrrd {

static_assert(std::endian::native == std::endian::little, "NRRD payloads are handled as little endian");

namespace {

template <typename T>
void append_value(std::vector<std::uint8_t>& out, double v) {
  T t;
  if constexpr (std::is_integral_v<T>) {
    if (v != std::floor(v) || v < static_cast<double>(std::numeric_limits<T>::min()) ||
        v > static_cast<double>(std::numeric_limits<T>::max()))
      throw Error(ErrorCode::NonRepresentable, "voxel value " + format_shortest(v) + " does not fit the pixel type");
    t = static_cast<T>(v);
  } else {
    t = static_cast<T>(v);
    if constexpr (std::is_same_v<T, float>)
      if (static_cast<double>(t) != v && std::isfinite(v))
        throw Error(ErrorCode::NonRepresentable, "voxel value " + format_shortest(v) + " is not exact in float32");
  }
  std::uint8_t buf[sizeof(T)];
  std::memcpy(buf, &t, sizeof(T));
  out.insert(out.end(), buf, buf + sizeof(T));
}

std::string vector_text(const Vec3& v) {
  return "(" + format_shortest(v[0]) + "," + format_shortest(v[1]) + "," + format_shortest(v[2]) + ")";
}

std::string header_text(const Geometry& g, PixelType type) {
  std::string h = "NRRD0004\n";
  h += "type: " + std::string(nrrd_type_name(type)) + "\n";
  h += "dimension: 3\n";
  h += "sizes: " + std::to_string(g.dims[0]) + " " + std::to_string(g.dims[1]) + " " + std::to_string(g.dims[2]) + "\n";
  h += "space: left-posterior-superior\n";
  h += "space directions:";
  for (int c = 0; c < 3; ++c) {
    Vec3 axis{g.direction[0][c] * g.spacing[c], g.direction[1][c] * g.spacing[c], g.direction[2][c] * g.spacing[c]};
    h += " " + vector_text(axis);
  }
  h += "\n";
  h += "space origin: " + vector_text(g.origin) + "\n";
  h += "endian: little\n";
  h += "encoding: raw\n\n";
  return h;
}

std::vector<std::uint8_t> encode_values(const Geometry& g, PixelType type, std::span<const double> voxels) {
  for (double v : voxels)
    if (!std::isfinite(v)) throw Error(ErrorCode::NonRepresentable, "non-finite voxel");
  std::string header = header_text(g, type);
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + voxels.size() * pixel_type_width(type));
  for (double v : voxels) {
    switch (type) {
      case PixelType::Int8: append_value<std::int8_t>(out, v); break;
      case PixelType::UInt8: append_value<std::uint8_t>(out, v); break;
      case PixelType::Int16: append_value<std::int16_t>(out, v); break;
      case PixelType::UInt16: append_value<std::uint16_t>(out, v); break;
      case PixelType::Int32: append_value<std::int32_t>(out, v); break;
      case PixelType::UInt32: append_value<std::uint32_t>(out, v); break;
      case PixelType::Float32: append_value<float>(out, v); break;
      case PixelType::Float64: append_value<double>(out, v); break;
    }
  }
  return out;
}

PixelType parse_type(const std::string& name) {
  static const std::map<std::string, PixelType> kTypes = {
      {"signed char", PixelType::Int8},     {"int8", PixelType::Int8},
      {"int8_t", PixelType::Int8},          {"uchar", PixelType::UInt8},
      {"unsigned char", PixelType::UInt8},  {"uint8", PixelType::UInt8},
      {"uint8_t", PixelType::UInt8},        {"short", PixelType::Int16},
      {"short int", PixelType::Int16},      {"signed short", PixelType::Int16},
      {"signed short int", PixelType::Int16}, {"int16", PixelType::Int16},
      {"int16_t", PixelType::Int16},        {"ushort", PixelType::UInt16},
      {"unsigned short", PixelType::UInt16}, {"unsigned short int", PixelType::UInt16},
      {"uint16", PixelType::UInt16},        {"uint16_t", PixelType::UInt16},
      {"int", PixelType::Int32},            {"signed int", PixelType::Int32},
      {"int32", PixelType::Int32},          {"int32_t", PixelType::Int32},
      {"uint", PixelType::UInt32},          {"unsigned int", PixelType::UInt32},
      {"uint32", PixelType::UInt32},        {"uint32_t", PixelType::UInt32},
      {"float", PixelType::Float32},        {"double", PixelType::Float64},
  };
  auto it = kTypes.find(name);
  if (it == kTypes.end()) throw Error(ErrorCode::BadHeader, "unsupported type '" + name + "'");
  return it->second;
}

std::vector<double> parse_numbers(const std::string& text, const char* field) {
  std::vector<double> out;
  std::string cleaned = text;
  for (char& c : cleaned)
    if (c == '(' || c == ')' || c == ',') c = ' ';
  std::istringstream in(cleaned);
  std::string token;
  while (in >> token) {
    auto v = parse_double(token);
    if (!v) throw Error(ErrorCode::BadHeader, std::string(field) + ": bad number '" + token + "'");
    out.push_back(*v);
  }
  return out;
}

std::vector<std::uint8_t> gunzip(std::span<const std::uint8_t> data) {
  z_stream zs{};
  if (inflateInit2(&zs, 15 + 32) != Z_OK) throw Error(ErrorCode::BadHeader, "zlib init failed");
  zs.next_in = const_cast<Bytef*>(data.data());
  zs.avail_in = static_cast<uInt>(data.size());
  std::vector<std::uint8_t> out;
  std::uint8_t chunk[1 << 16];
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    zs.next_out = chunk;
    zs.avail_out = sizeof(chunk);
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      throw Error(ErrorCode::SizeMismatch, "gzip payload is corrupt or truncated");
    }
    out.insert(out.end(), chunk, chunk + (sizeof(chunk) - zs.avail_out));
    if (rc == Z_OK && zs.avail_in == 0 && zs.avail_out != 0) {
      inflateEnd(&zs);
      throw Error(ErrorCode::SizeMismatch, "gzip payload is truncated");
    }
  }
  inflateEnd(&zs);
  return out;
}

template <typename T>
double read_value(const std::uint8_t* p) {
  T t;
  std::memcpy(&t, p, sizeof(T));
  return static_cast<double>(t);
}

}  // namespace

std::vector<std::uint8_t> encode(const Volume& volume) {
  return encode_values(volume.geometry(), volume.pixel_type(), volume.voxels());
}

std::vector<std::uint8_t> encode(const Mask& mask) {
  std::vector<double> v(mask.voxels().begin(), mask.voxels().end());
  return encode_values(mask.geometry(), PixelType::UInt8, v);
}

Volume decode(std::span<const std::uint8_t> bytes) {
  // Header: lines up to the first empty line.
  std::size_t pos = 0;
  auto next_line = [&](std::string& line) {
    if (pos >= bytes.size()) return false;
    auto nl = std::find(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end(), '\n');
    std::size_t end = static_cast<std::size_t>(nl - bytes.begin());
    line.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos), nl);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    pos = end < bytes.size() ? end + 1 : bytes.size();
    return end < bytes.size();
  };

  std::string line;
  if (!next_line(line) || line.size() != 8 || line.rfind("NRRD000", 0) != 0 || line[7] < '1' || line[7] > '5')
    throw Error(ErrorCode::BadHeader, "missing NRRD magic");

  std::map<std::string, std::string> fields;
  bool terminated = false;
  while (next_line(line)) {
    if (line.empty()) {
      terminated = true;
      break;
    }
    if (line[0] == '#') continue;
    if (line.find(":=") != std::string::npos) continue;  // key/value pairs
    auto colon = line.find(": ");
    if (colon == std::string::npos) throw Error(ErrorCode::BadHeader, "malformed header line '" + line + "'");
    fields[line.substr(0, colon)] = std::string(trim(line.substr(colon + 2)));
  }
  if (!terminated) throw Error(ErrorCode::BadHeader, "header is not terminated by a blank line");

  auto field = [&](const char* key) -> const std::string* {
    auto it = fields.find(key);
    return it == fields.end() ? nullptr : &it->second;
  };
  for (const char* required : {"type", "dimension", "sizes", "encoding"})
    if (!field(required)) throw Error(ErrorCode::BadHeader, std::string("missing field '") + required + "'");
  if (field("data file") || field("datafile")) throw Error(ErrorCode::BadHeader, "detached data is not supported");

  PixelType type = parse_type(*field("type"));
  auto dimension = parse_integer(*field("dimension"));
  if (!dimension || *dimension < 1 || *dimension > 3) throw Error(ErrorCode::BadHeader, "dimension must be 1..3");
  auto sizes = parse_numbers(*field("sizes"), "sizes");
  if (static_cast<long long>(sizes.size()) != *dimension) throw Error(ErrorCode::BadHeader, "sizes/dimension mismatch");

  Geometry g;
  for (std::size_t a = 0; a < sizes.size(); ++a) {
    if (sizes[a] < 1 || sizes[a] != std::floor(sizes[a])) throw Error(ErrorCode::BadHeader, "bad size");
    g.dims[a] = static_cast<std::size_t>(sizes[a]);
  }

  if (const auto* endian = field("endian"); endian && *endian != "little")
    throw Error(ErrorCode::BadHeader, "only little endian payloads are supported");
  if (!field("endian") && pixel_type_width(type) > 1) throw Error(ErrorCode::BadHeader, "missing endian field");

  if (const auto* dirs = field("space directions")) {
    std::string text = *dirs;
    std::vector<Vec3> axes;
    std::size_t p = 0;
    while ((p = text.find('(', p)) != std::string::npos) {
      auto close = text.find(')', p);
      if (close == std::string::npos) throw Error(ErrorCode::BadHeader, "space directions: unbalanced parenthesis");
      auto v = parse_numbers(text.substr(p, close - p + 1), "space directions");
      if (v.size() != 3) throw Error(ErrorCode::BadHeader, "space directions: expected 3-vectors");
      axes.push_back({v[0], v[1], v[2]});
      p = close + 1;
    }
    if (axes.size() != sizes.size()) throw Error(ErrorCode::BadHeader, "space directions: one vector per axis expected");
    for (std::size_t c = 0; c < axes.size(); ++c) {
      double len = std::sqrt(axes[c][0] * axes[c][0] + axes[c][1] * axes[c][1] + axes[c][2] * axes[c][2]);
      if (!(len > 0)) throw Error(ErrorCode::BadHeader, "space directions: zero vector");
      g.spacing[c] = len;
      for (int r = 0; r < 3; ++r) g.direction[r][c] = axes[c][r] / len;
    }
  } else if (const auto* spacings = field("spacings")) {
    auto v = parse_numbers(*spacings, "spacings");
    if (v.size() != sizes.size()) throw Error(ErrorCode::BadHeader, "spacings: one value per axis expected");
    for (std::size_t a = 0; a < v.size(); ++a) g.spacing[a] = v[a];
  }
  if (const auto* origin = field("space origin")) {
    auto v = parse_numbers(*origin, "space origin");
    if (v.size() != 3) throw Error(ErrorCode::BadHeader, "space origin: expected a 3-vector");
    g.origin = {v[0], v[1], v[2]};
  }

  std::span<const std::uint8_t> payload = bytes.subspan(pos);
  std::vector<std::uint8_t> inflated;
  const std::string& encoding = *field("encoding");
  if (encoding == "gzip" || encoding == "gz") {
    inflated = gunzip(payload);
    payload = inflated;
  } else if (encoding != "raw") {
    throw Error(ErrorCode::BadHeader, "unsupported encoding '" + encoding + "'");
  }

  std::size_t width = pixel_type_width(type);
  std::size_t count = g.voxel_count();
  if (payload.size() != count * width)
    throw Error(ErrorCode::SizeMismatch, "payload has " + std::to_string(payload.size()) + " bytes, expected " +
                                             std::to_string(count * width));

  std::vector<double> voxels(count);
  const std::uint8_t* p = payload.data();
  for (std::size_t i = 0; i < count; ++i, p += width) {
    switch (type) {
      case PixelType::Int8: voxels[i] = read_value<std::int8_t>(p); break;
      case PixelType::UInt8: voxels[i] = read_value<std::uint8_t>(p); break;
      case PixelType::Int16: voxels[i] = read_value<std::int16_t>(p); break;
      case PixelType::UInt16: voxels[i] = read_value<std::uint16_t>(p); break;
      case PixelType::Int32: voxels[i] = read_value<std::int32_t>(p); break;
      case PixelType::UInt32: voxels[i] = read_value<std::uint32_t>(p); break;
      case PixelType::Float32: voxels[i] = read_value<float>(p); break;
      case PixelType::Float64: voxels[i] = read_value<double>(p); break;
    }
  }
  try {
    return Volume(g, std::move(voxels), type);
  } catch (const Error& e) {
    throw Error(ErrorCode::BadHeader, e.what());
  }
}

void write(const Volume& volume, const std::filesystem::path& path) { write_file_atomic(path, encode(volume)); }

void write(const Mask& mask, const std::filesystem::path& path) { write_file_atomic(path, encode(mask)); }

Volume read(const std::filesystem::path& path) { return decode(read_binary_file(path)); }

Mask read_mask(const std::filesystem::path& path) { return volume_to_mask(read(path)); }

}  // namespace radgate::nrrd
