#include "radgate/dicom_writer.hpp"

#include <algorithm>
#include <array>
#include <cstdio>

#include "radgate/error.hpp"
#include "radgate/numfmt.hpp"

namespace radgate::dicom {

namespace {

constexpr std::string_view kImplementationClassUid = "1.2.826.0.1.3680043.10.1042.1";
constexpr std::string_view kCtImageStorage = "1.2.840.10008.5.1.4.1.1.2";

bool long_length_vr(std::string_view vr) {
  static constexpr std::array<std::string_view, 13> kLong = {
      "OB", "OD", "OF", "OL", "OV", "OW", "SQ", "SV", "UC", "UN", "UR", "UT", "UV"};
  for (auto v : kLong)
    if (v == vr) return true;
  return false;
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

void put_tag(std::vector<std::uint8_t>& out, DicomTag tag) {
  put_u16(out, tag.group);
  put_u16(out, tag.element);
}

class Serializer {
 public:
  Serializer(bool explicit_vr, bool undefined_sequences)
      : explicit_vr_(explicit_vr), undefined_sequences_(undefined_sequences) {}

  void dataset(std::vector<std::uint8_t>& out, const DataSet& ds) const {
    for (const auto& e : ds.elements()) element(out, e);
  }

 private:
  void header(std::vector<std::uint8_t>& out, const Element& e, std::uint32_t length) const {
    put_tag(out, e.tag);
    if (!explicit_vr_) {
      put_u32(out, length);
      return;
    }
    out.push_back(static_cast<std::uint8_t>(e.vr.at(0)));
    out.push_back(static_cast<std::uint8_t>(e.vr.at(1)));
    if (long_length_vr(e.vr)) {
      put_u16(out, 0);
      put_u32(out, length);
    } else {
      if (length > 0xFFFF)
        throw Error(ErrorCode::InvalidParameter, "value too long for VR " + e.vr + " in " + e.tag.str());
      put_u16(out, static_cast<std::uint16_t>(length));
    }
  }

  void element(std::vector<std::uint8_t>& out, const Element& e) const {
    if (!e.is_sequence()) {
      header(out, e, static_cast<std::uint32_t>(e.value.size()));
      out.insert(out.end(), e.value.begin(), e.value.end());
      return;
    }
    std::vector<std::uint8_t> body;
    for (const auto& item : e.items) {
      std::vector<std::uint8_t> content;
      dataset(content, item);
      put_tag(body, tags::Item);
      if (undefined_sequences_) {
        put_u32(body, 0xFFFFFFFFu);
        body.insert(body.end(), content.begin(), content.end());
        put_tag(body, tags::ItemDelimitation);
        put_u32(body, 0);
      } else {
        put_u32(body, static_cast<std::uint32_t>(content.size()));
        body.insert(body.end(), content.begin(), content.end());
      }
    }
    if (undefined_sequences_) {
      header(out, e, 0xFFFFFFFFu);
      out.insert(out.end(), body.begin(), body.end());
      put_tag(out, tags::SequenceDelimitation);
      put_u32(out, 0);
    } else {
      header(out, e, static_cast<std::uint32_t>(body.size()));
      out.insert(out.end(), body.begin(), body.end());
    }
  }

  bool explicit_vr_;
  bool undefined_sequences_;
};

}  // namespace

Element text_element(DicomTag tag, std::string_view vr, std::string_view value) {
  Element e{tag, std::string(vr), std::vector<std::uint8_t>(value.begin(), value.end()), {}};
  if (e.value.size() % 2) e.value.push_back(vr == "UI" ? '\0' : ' ');
  return e;
}

std::string format_decimal_string(double value) {
  std::string text = format_shortest(value);
  for (int digits = 15; text.size() > 16 && digits > 1; --digits) {
    std::array<char, 48> buf{};
    std::snprintf(buf.data(), buf.size(), "%.*g", digits, value);
    text = buf.data();
  }
  return text;
}

Element decimal_string_element(DicomTag tag, std::span<const double> values) {
  std::string text;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) text.push_back('\\');
    text += format_decimal_string(values[i]);
  }
  return text_element(tag, "DS", text);
}

Element integer_string_element(DicomTag tag, std::span<const long long> values) {
  std::string text;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) text.push_back('\\');
    text += std::to_string(values[i]);
  }
  return text_element(tag, "IS", text);
}

Element us_element(DicomTag tag, std::uint16_t value) {
  return Element{tag, "US", {static_cast<std::uint8_t>(value & 0xFF), static_cast<std::uint8_t>(value >> 8)}, {}};
}

Element binary_element(DicomTag tag, std::string_view vr, std::vector<std::uint8_t> bytes) {
  Element e{tag, std::string(vr), std::move(bytes), {}};
  if (e.value.size() % 2) e.value.push_back(0);
  return e;
}

Element sequence_element(DicomTag tag, std::vector<DataSet> items) {
  return Element{tag, "SQ", {}, std::move(items)};
}

std::vector<std::uint8_t> write_part10(const DataSet& body, const WriteOptions& options) {
  std::string ts_uid = options.transfer_syntax_uid.value_or(
      std::string(options.transfer_syntax == TransferSyntax::ExplicitVRLittleEndian
                       ? kExplicitVRLittleEndianUid
                       : kImplicitVRLittleEndianUid));

  DataSet meta;
  meta.set(binary_element({0x0002, 0x0001}, "OB", {0x00, 0x01}));
  meta.set(text_element(tags::MediaStorageSopClassUid, "UI",
                        find_text(body, tags::SopClassUid).value_or(std::string(kCtImageStorage))));
  meta.set(text_element(tags::MediaStorageSopInstanceUid, "UI",
                        find_text(body, tags::SopInstanceUid).value_or("1.2.3")));
  meta.set(text_element(tags::TransferSyntaxUid, "UI", ts_uid));
  meta.set(text_element(tags::ImplementationClassUid, "UI", kImplementationClassUid));

  std::vector<std::uint8_t> meta_bytes;
  Serializer(true, false).dataset(meta_bytes, meta);

  std::vector<std::uint8_t> out(132, 0);
  std::copy_n("DICM", 4, out.begin() + 128);
  Element group_length{tags::FileMetaGroupLength, "UL", {}, {}};
  put_u32(group_length.value, static_cast<std::uint32_t>(meta_bytes.size()));
  Serializer(true, false).dataset(out, [&] {
    DataSet gl;
    gl.set(group_length);
    return gl;
  }());
  out.insert(out.end(), meta_bytes.begin(), meta_bytes.end());

  bool explicit_vr = options.transfer_syntax == TransferSyntax::ExplicitVRLittleEndian;
  Serializer(explicit_vr, options.undefined_length_sequences).dataset(out, body);
  return out;
}

}  // namespace radgate::dicom
