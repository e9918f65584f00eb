#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "radgate/dicom.hpp"

namespace radgate::dicom {

// Element builders. Values are padded to even length (NUL for UI, space for
// other text VRs).
Element text_element(DicomTag tag, std::string_view vr, std::string_view value);
Element decimal_string_element(DicomTag tag, std::span<const double> values);
Element integer_string_element(DicomTag tag, std::span<const long long> values);
Element us_element(DicomTag tag, std::uint16_t value);
Element binary_element(DicomTag tag, std::string_view vr, std::vector<std::uint8_t> bytes);
Element sequence_element(DicomTag tag, std::vector<DataSet> items);

/// DS text of at most 16 characters; shortest round-trip form when it fits.
std::string format_decimal_string(double value);

struct WriteOptions {
  TransferSyntax transfer_syntax = TransferSyntax::ExplicitVRLittleEndian;
  bool undefined_length_sequences = false;
  /// Written verbatim into (0002,0010) instead of the UID matching
  /// transfer_syntax. Used to produce files this parser must reject.
  std::optional<std::string> transfer_syntax_uid;
};

/// Serializes a minimal Part-10 file: preamble, "DICM", a generated file
/// meta group, then `body` in the requested encoding.
std::vector<std::uint8_t> write_part10(const DataSet& body, const WriteOptions& options = {});

}  // namespace radgate::dicom
