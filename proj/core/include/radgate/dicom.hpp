#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace radgate::dicom {

struct DicomTag {
  std::uint16_t group = 0;
  std::uint16_t element = 0;

  constexpr auto operator<=>(const DicomTag&) const = default;
  constexpr std::uint32_t key() const noexcept {
    return (static_cast<std::uint32_t>(group) << 16) | element;
  }
  /// "(GGGG,EEEE)" in upper-case hex.
  std::string str() const;
};

enum class TransferSyntax { ExplicitVRLittleEndian, ImplicitVRLittleEndian };

inline constexpr std::string_view kExplicitVRLittleEndianUid = "1.2.840.10008.1.2.1";
inline constexpr std::string_view kImplicitVRLittleEndianUid = "1.2.840.10008.1.2";

struct Element;

/// One nesting level of a DICOM data set. Elements are kept in strictly
/// increasing tag order.
class DataSet {
 public:
  const Element* find(DicomTag tag) const;
  bool contains(DicomTag tag) const { return find(tag) != nullptr; }
  const std::vector<Element>& elements() const noexcept { return elements_; }
  bool empty() const noexcept { return elements_.empty(); }

  /// Inserts or replaces, keeping tag order.
  void set(Element element);
  void erase(DicomTag tag);

 private:
  std::vector<Element> elements_;
};

struct Element {
  DicomTag tag;
  std::string vr;                   // two-character code
  std::vector<std::uint8_t> value;  // raw bytes, empty for sequences
  std::vector<DataSet> items;       // sequence items when vr == "SQ"

  bool is_sequence() const noexcept { return vr == "SQ"; }
};

struct DicomObject {
  TransferSyntax transfer_syntax = TransferSyntax::ExplicitVRLittleEndian;
  DataSet dataset;  // file meta group (0002) followed by the body

  const Element* find(DicomTag tag) const { return dataset.find(tag); }
};

/// Parses a Part-10 file image. Elements up to and including the top-level
/// PixelData are materialized; unknown tags are kept as raw bytes.
DicomObject parse_file(std::span<const std::uint8_t> bytes);

using DicomValue = std::variant<std::string, std::vector<double>, std::vector<long long>>;

/// Typed decode driven by the element VR. DS/FL/FD give decimal lists,
/// IS and binary integer VRs give integer lists, everything else text.
DicomValue decode_value(const DataSet& dataset, DicomTag tag);
inline DicomValue decode_value(const DicomObject& obj, DicomTag tag) {
  return decode_value(obj.dataset, tag);
}

std::string get_text(const DataSet& dataset, DicomTag tag);
std::optional<std::string> find_text(const DataSet& dataset, DicomTag tag);
std::vector<double> get_decimals(const DataSet& dataset, DicomTag tag);
std::optional<std::vector<double>> find_decimals(const DataSet& dataset, DicomTag tag);
std::optional<long long> find_integer(const DataSet& dataset, DicomTag tag);

/// VR from the built-in dictionary used for implicit-VR decoding. Covers the
/// tags this toolkit reads; returns nullopt for everything else.
std::optional<std::string_view> dictionary_vr(DicomTag tag);

namespace tags {
inline constexpr DicomTag FileMetaGroupLength{0x0002, 0x0000};
inline constexpr DicomTag MediaStorageSopClassUid{0x0002, 0x0002};
inline constexpr DicomTag MediaStorageSopInstanceUid{0x0002, 0x0003};
inline constexpr DicomTag TransferSyntaxUid{0x0002, 0x0010};
inline constexpr DicomTag ImplementationClassUid{0x0002, 0x0012};
inline constexpr DicomTag SopClassUid{0x0008, 0x0016};
inline constexpr DicomTag SopInstanceUid{0x0008, 0x0018};
inline constexpr DicomTag StudyDate{0x0008, 0x0020};
inline constexpr DicomTag SeriesDate{0x0008, 0x0021};
inline constexpr DicomTag Modality{0x0008, 0x0060};
inline constexpr DicomTag Manufacturer{0x0008, 0x0070};
inline constexpr DicomTag ReferencedSopClassUid{0x0008, 0x1150};
inline constexpr DicomTag ReferencedSopInstanceUid{0x0008, 0x1155};
inline constexpr DicomTag PatientName{0x0010, 0x0010};
inline constexpr DicomTag PatientId{0x0010, 0x0020};
inline constexpr DicomTag SliceThickness{0x0018, 0x0050};
inline constexpr DicomTag Kvp{0x0018, 0x0060};
inline constexpr DicomTag ExposureTime{0x0018, 0x1150};
inline constexpr DicomTag XRayTubeCurrent{0x0018, 0x1151};
inline constexpr DicomTag Exposure{0x0018, 0x1152};
inline constexpr DicomTag ConvolutionKernel{0x0018, 0x1210};
inline constexpr DicomTag StudyInstanceUid{0x0020, 0x000D};
inline constexpr DicomTag SeriesInstanceUid{0x0020, 0x000E};
inline constexpr DicomTag InstanceNumber{0x0020, 0x0013};
inline constexpr DicomTag ImagePositionPatient{0x0020, 0x0032};
inline constexpr DicomTag ImageOrientationPatient{0x0020, 0x0037};
inline constexpr DicomTag FrameOfReferenceUid{0x0020, 0x0052};
inline constexpr DicomTag SamplesPerPixel{0x0028, 0x0002};
inline constexpr DicomTag PhotometricInterpretation{0x0028, 0x0004};
inline constexpr DicomTag Rows{0x0028, 0x0010};
inline constexpr DicomTag Columns{0x0028, 0x0011};
inline constexpr DicomTag PixelSpacing{0x0028, 0x0030};
inline constexpr DicomTag BitsAllocated{0x0028, 0x0100};
inline constexpr DicomTag BitsStored{0x0028, 0x0101};
inline constexpr DicomTag HighBit{0x0028, 0x0102};
inline constexpr DicomTag PixelRepresentation{0x0028, 0x0103};
inline constexpr DicomTag RescaleIntercept{0x0028, 0x1052};
inline constexpr DicomTag RescaleSlope{0x0028, 0x1053};
inline constexpr DicomTag ReferencedFrameOfReferenceSequence{0x3006, 0x0010};
inline constexpr DicomTag RtReferencedStudySequence{0x3006, 0x0012};
inline constexpr DicomTag RtReferencedSeriesSequence{0x3006, 0x0014};
inline constexpr DicomTag ContourImageSequence{0x3006, 0x0016};
inline constexpr DicomTag StructureSetRoiSequence{0x3006, 0x0020};
inline constexpr DicomTag RoiNumber{0x3006, 0x0022};
inline constexpr DicomTag ReferencedFrameOfReferenceUid{0x3006, 0x0024};
inline constexpr DicomTag RoiName{0x3006, 0x0026};
inline constexpr DicomTag RoiContourSequence{0x3006, 0x0039};
inline constexpr DicomTag ContourSequence{0x3006, 0x0040};
inline constexpr DicomTag ContourGeometricType{0x3006, 0x0042};
inline constexpr DicomTag NumberOfContourPoints{0x3006, 0x0046};
inline constexpr DicomTag ContourData{0x3006, 0x0050};
inline constexpr DicomTag ReferencedRoiNumber{0x3006, 0x0084};
inline constexpr DicomTag PixelData{0x7FE0, 0x0010};

inline constexpr DicomTag Item{0xFFFE, 0xE000};
inline constexpr DicomTag ItemDelimitation{0xFFFE, 0xE00D};
inline constexpr DicomTag SequenceDelimitation{0xFFFE, 0xE0DD};
}  // namespace tags

}  // namespace radgate::dicom
