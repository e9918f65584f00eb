#include "radgate/dicom.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstring>

#include "radgate/error.hpp"
#include "radgate/numfmt.hpp"

namespace radgate::dicom {

std::string DicomTag::str() const {
  std::array<char, 16> buf{};
  std::snprintf(buf.data(), buf.size(), "(%04X,%04X)", group, element);
  return buf.data();
}

const Element* DataSet::find(DicomTag tag) const {
  auto it = std::lower_bound(elements_.begin(), elements_.end(), tag,
                             [](const Element& e, DicomTag t) { return e.tag < t; });
  return (it != elements_.end() && it->tag == tag) ? &*it : nullptr;
}

void DataSet::set(Element element) {
  auto it = std::lower_bound(elements_.begin(), elements_.end(), element.tag,
                             [](const Element& e, DicomTag t) { return e.tag < t; });
  if (it != elements_.end() && it->tag == element.tag)
    *it = std::move(element);
  else
    elements_.insert(it, std::move(element));
}

void DataSet::erase(DicomTag tag) {
  std::erase_if(elements_, [&](const Element& e) { return e.tag == tag; });
}

namespace {

constexpr std::uint32_t kUndefinedLength = 0xFFFFFFFFu;
constexpr int kMaxDepth = 16;

bool has_long_length(std::string_view vr) {
  static constexpr std::array<std::string_view, 13> kLong = {
      "OB", "OD", "OF", "OL", "OV", "OW", "SQ", "SV", "UC", "UN", "UR", "UT", "UV"};
  return std::find(kLong.begin(), kLong.end(), vr) != kLong.end();
}

bool valid_vr_chars(char a, char b) { return a >= 'A' && a <= 'Z' && b >= 'A' && b <= 'Z'; }

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t pos() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }
  bool at_end() const noexcept { return pos_ >= bytes_.size(); }

  void require(std::size_t n, DicomTag tag) const {
    if (remaining() < n)
      throw Error(ErrorCode::TruncatedElement,
                  "element " + tag.str() + " needs " + std::to_string(n) + " bytes at offset " +
                      std::to_string(pos_) + ", " + std::to_string(remaining()) + " remain");
  }

  std::uint16_t u16() {
    std::uint16_t v = static_cast<std::uint16_t>(bytes_[pos_] | (bytes_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    std::uint32_t v = static_cast<std::uint32_t>(bytes_[pos_]) |
                      (static_cast<std::uint32_t>(bytes_[pos_ + 1]) << 8) |
                      (static_cast<std::uint32_t>(bytes_[pos_ + 2]) << 16) |
                      (static_cast<std::uint32_t>(bytes_[pos_ + 3]) << 24);
    pos_ += 4;
    return v;
  }
  DicomTag peek_tag() const {
    return DicomTag{static_cast<std::uint16_t>(bytes_[pos_] | (bytes_[pos_ + 1] << 8)),
                    static_cast<std::uint16_t>(bytes_[pos_ + 2] | (bytes_[pos_ + 3] << 8))};
  }
  DicomTag tag() {
    std::uint16_t g = u16();
    std::uint16_t e = u16();
    return DicomTag{g, e};
  }
  std::vector<std::uint8_t> take(std::size_t n) {
    std::vector<std::uint8_t> out(bytes_.begin() + static_cast<std::ptrdiff_t>(pos_),
                                  bytes_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
    pos_ += n;
    return out;
  }
  std::string vr() {
    std::string out{static_cast<char>(bytes_[pos_]), static_cast<char>(bytes_[pos_ + 1])};
    pos_ += 2;
    return out;
  }
  void skip(std::size_t n) { pos_ += n; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

enum class StopAt { End, ItemDelimiter, AfterPixelData };

class Parser {
 public:
  Parser(Reader& reader, bool explicit_vr) : in_(reader), explicit_vr_(explicit_vr) {}

  // Parses elements into `out` until `limit` bytes have been consumed, an
  // item delimiter is seen (when allowed), or PixelData has been read.
  void parse_level(DataSet& out, std::size_t limit, StopAt stop, int depth) {
    if (depth > kMaxDepth) throw Error(ErrorCode::MalformedElement, "sequence nesting too deep");
    std::optional<DicomTag> last;
    while (in_.pos() < limit) {
      in_.require(8, DicomTag{});
      DicomTag tag = in_.peek_tag();
      if (tag == tags::ItemDelimitation) {
        if (stop != StopAt::ItemDelimiter)
          throw Error(ErrorCode::MalformedElement, "unexpected item delimiter");
        in_.skip(8);
        return;
      }
      if (tag.group == 0xFFFE)
        throw Error(ErrorCode::MalformedElement, "dangling delimiter " + tag.str());
      if (last && !(*last < tag))
        throw Error(ErrorCode::MalformedElement,
                    "tag " + tag.str() + " out of order after " + last->str());
      Element element = read_element(depth);
      last = element.tag;
      bool pixel_data = element.tag == tags::PixelData;
      out.set(std::move(element));
      if (pixel_data && stop == StopAt::AfterPixelData) return;
    }
    if (stop == StopAt::ItemDelimiter)
      throw Error(ErrorCode::TruncatedElement, "undefined-length item is missing its delimiter");
  }

  void parse_meta(DataSet& out) {
    std::optional<DicomTag> last;
    while (in_.remaining() >= 4 && in_.peek_tag().group == 0x0002) {
      DicomTag tag = in_.peek_tag();
      if (last && !(*last < tag))
        throw Error(ErrorCode::MalformedElement, "file meta tag " + tag.str() + " out of order");
      in_.require(8, tag);
      out.set(read_element(0));
      last = tag;
    }
  }

 private:
  Element read_element(int depth) {
    Element element;
    element.tag = in_.tag();
    std::uint32_t length = 0;
    if (explicit_vr_) {
      element.vr = in_.vr();
      if (!valid_vr_chars(element.vr[0], element.vr[1]))
        throw Error(ErrorCode::MalformedElement, "invalid VR for " + element.tag.str());
      if (has_long_length(element.vr)) {
        in_.require(6, element.tag);
        in_.skip(2);
        length = in_.u32();
      } else {
        in_.require(2, element.tag);
        length = in_.u16();
      }
    } else {
      length = in_.u32();
      auto vr = dictionary_vr(element.tag);
      element.vr = vr ? std::string(*vr) : std::string("UN");
    }

    if (element.vr == "SQ") {
      read_sequence(element, length, depth);
      return element;
    }
    if (length == kUndefinedLength)
      throw Error(ErrorCode::MalformedElement,
                  "undefined length on non-sequence element " + element.tag.str());
    in_.require(length, element.tag);
    element.value = in_.take(length);
    return element;
  }

  void read_sequence(Element& element, std::uint32_t length, int depth) {
    bool undefined = length == kUndefinedLength;
    std::size_t end = 0;
    if (!undefined) {
      in_.require(length, element.tag);
      end = in_.pos() + length;
    }
    while (undefined || in_.pos() < end) {
      in_.require(8, element.tag);
      DicomTag tag = in_.tag();
      std::uint32_t item_length = in_.u32();
      if (tag == tags::SequenceDelimitation) {
        if (!undefined)
          throw Error(ErrorCode::MalformedElement, "sequence delimiter in defined-length sequence");
        return;
      }
      if (tag != tags::Item)
        throw Error(ErrorCode::MalformedElement,
                    "expected item in sequence " + element.tag.str() + ", found " + tag.str());
      DataSet item;
      if (item_length == kUndefinedLength) {
        parse_level(item, undefined ? SIZE_MAX : end, StopAt::ItemDelimiter, depth + 1);
      } else {
        in_.require(item_length, element.tag);
        std::size_t item_end = in_.pos() + item_length;
        if (!undefined && item_end > end)
          throw Error(ErrorCode::MalformedElement, "item overruns sequence " + element.tag.str());
        parse_level(item, item_end, StopAt::End, depth + 1);
        if (in_.pos() != item_end)
          throw Error(ErrorCode::MalformedElement, "item length mismatch in " + element.tag.str());
      }
      element.items.push_back(std::move(item));
    }
    if (in_.pos() != end)
      throw Error(ErrorCode::MalformedElement, "sequence length mismatch in " + element.tag.str());
  }

 private:
  Reader& in_;
  bool explicit_vr_;
};

}  // namespace

DicomObject parse_file(std::span<const std::uint8_t> bytes) {
  constexpr std::size_t kPreamble = 128;
  if (bytes.size() < kPreamble + 4 || bytes[128] != 'D' || bytes[129] != 'I' ||
      bytes[130] != 'C' || bytes[131] != 'M')
    throw Error(ErrorCode::MissingMagic, "no DICM marker after the 128-byte preamble");

  Reader reader(bytes);
  reader.skip(kPreamble + 4);

  DicomObject obj;
  // File meta information is always explicit VR little endian.
  DataSet meta;
  Parser(reader, true).parse_meta(meta);
  auto ts_uid = find_text(meta, tags::TransferSyntaxUid);
  if (!ts_uid) throw Error(ErrorCode::UnsupportedTransferSyntax, "no transfer syntax UID in file meta");
  if (*ts_uid == kExplicitVRLittleEndianUid)
    obj.transfer_syntax = TransferSyntax::ExplicitVRLittleEndian;
  else if (*ts_uid == kImplicitVRLittleEndianUid)
    obj.transfer_syntax = TransferSyntax::ImplicitVRLittleEndian;
  else
    throw Error(ErrorCode::UnsupportedTransferSyntax, "transfer syntax " + *ts_uid);

  DataSet body;
  Parser body_parser(reader, obj.transfer_syntax == TransferSyntax::ExplicitVRLittleEndian);
  body_parser.parse_level(body, bytes.size(), StopAt::AfterPixelData, 0);

  for (const auto& e : meta.elements()) obj.dataset.set(e);
  for (auto& e : body.elements()) {
    if (e.tag.group == 0x0002)
      throw Error(ErrorCode::MalformedElement, "file meta element " + e.tag.str() + " in body");
    obj.dataset.set(e);
  }
  return obj;
}

namespace {

std::string strip_padding(const std::vector<std::uint8_t>& raw) {
  std::string text(raw.begin(), raw.end());
  while (!text.empty() && (text.back() == ' ' || text.back() == '\0')) text.pop_back();
  return text;
}

std::vector<std::string_view> split_backslash(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find('\\', start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

template <typename T>
std::vector<T> read_binary_values(const Element& e) {
  std::vector<T> out(e.value.size() / sizeof(T));
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::array<std::uint8_t, sizeof(T)> b{};
    std::copy_n(e.value.begin() + static_cast<std::ptrdiff_t>(i * sizeof(T)), sizeof(T), b.begin());
    std::memcpy(&out[i], b.data(), sizeof(T));
  }
  return out;
}

const Element& require(const DataSet& dataset, DicomTag tag) {
  const Element* e = dataset.find(tag);
  if (!e) throw Error(ErrorCode::TagAbsent, tag.str());
  return *e;
}

}  // namespace

DicomValue decode_value(const DataSet& dataset, DicomTag tag) {
  const Element& e = require(dataset, tag);
  const std::string& vr = e.vr;
  if (e.is_sequence())
    throw Error(ErrorCode::MalformedElement, "sequence " + tag.str() + " has no scalar value");

  if (vr == "DS") {
    std::vector<double> values;
    std::string text = strip_padding(e.value);
    if (text.empty()) return values;
    for (auto part : split_backslash(text)) {
      auto v = parse_double(part);
      if (!v) throw Error(ErrorCode::MalformedNumeric, tag.str() + " value '" + std::string(part) + "'");
      values.push_back(*v);
    }
    return values;
  }
  if (vr == "IS") {
    std::vector<long long> values;
    std::string text = strip_padding(e.value);
    if (text.empty()) return values;
    for (auto part : split_backslash(text)) {
      auto v = parse_integer(part);
      if (!v) throw Error(ErrorCode::MalformedNumeric, tag.str() + " value '" + std::string(part) + "'");
      values.push_back(*v);
    }
    return values;
  }
  auto widen = [](auto values) {
    return std::vector<long long>(values.begin(), values.end());
  };
  if (vr == "US") return widen(read_binary_values<std::uint16_t>(e));
  if (vr == "SS") return widen(read_binary_values<std::int16_t>(e));
  if (vr == "UL") return widen(read_binary_values<std::uint32_t>(e));
  if (vr == "SL") return widen(read_binary_values<std::int32_t>(e));
  if (vr == "OW") return widen(read_binary_values<std::uint16_t>(e));
  if (vr == "OB" || vr == "UN") return widen(e.value);
  if (vr == "FL") {
    auto f = read_binary_values<float>(e);
    return std::vector<double>(f.begin(), f.end());
  }
  if (vr == "FD") return read_binary_values<double>(e);
  return strip_padding(e.value);
}

std::string get_text(const DataSet& dataset, DicomTag tag) {
  auto value = decode_value(dataset, tag);
  if (auto* s = std::get_if<std::string>(&value)) return *s;
  return strip_padding(require(dataset, tag).value);
}

std::optional<std::string> find_text(const DataSet& dataset, DicomTag tag) {
  if (!dataset.contains(tag)) return std::nullopt;
  return get_text(dataset, tag);
}

std::vector<double> get_decimals(const DataSet& dataset, DicomTag tag) {
  auto value = decode_value(dataset, tag);
  if (auto* d = std::get_if<std::vector<double>>(&value)) return *d;
  if (auto* i = std::get_if<std::vector<long long>>(&value))
    return std::vector<double>(i->begin(), i->end());
  throw Error(ErrorCode::MalformedNumeric, tag.str() + " is not numeric");
}

std::optional<std::vector<double>> find_decimals(const DataSet& dataset, DicomTag tag) {
  if (!dataset.contains(tag)) return std::nullopt;
  return get_decimals(dataset, tag);
}

std::optional<long long> find_integer(const DataSet& dataset, DicomTag tag) {
  if (!dataset.contains(tag)) return std::nullopt;
  auto value = decode_value(dataset, tag);
  if (auto* i = std::get_if<std::vector<long long>>(&value)) {
    if (i->empty()) return std::nullopt;
    return i->front();
  }
  throw Error(ErrorCode::MalformedNumeric, tag.str() + " is not an integer");
}

}  // namespace radgate::dicom
