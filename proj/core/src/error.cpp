#include "radgate/error.hpp"

namespace radgate {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingMagic: return "MissingMagic";
    case ErrorCode::UnsupportedTransferSyntax: return "UnsupportedTransferSyntax";
    case ErrorCode::TruncatedElement: return "TruncatedElement";
    case ErrorCode::MalformedElement: return "MalformedElement";
    case ErrorCode::TagAbsent: return "TagAbsent";
    case ErrorCode::MalformedNumeric: return "MalformedNumeric";
    case ErrorCode::MissingGeometry: return "MissingGeometry";
    case ErrorCode::PixelLengthMismatch: return "PixelLengthMismatch";
    case ErrorCode::UnsupportedBitsAllocated: return "UnsupportedBitsAllocated";
    case ErrorCode::NotRtStruct: return "NotRtStruct";
    case ErrorCode::NoContours: return "NoContours";
    case ErrorCode::OddContourData: return "OddContourData";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::MixedSeriesGeometry: return "MixedSeriesGeometry";
    case ErrorCode::SingleSlice: return "SingleSlice";
    case ErrorCode::BadHeader: return "BadHeader";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::GeometryMismatch: return "GeometryMismatch";
    case ErrorCode::NonRepresentable: return "NonRepresentable";
    case ErrorCode::DegenerateIntensity: return "DegenerateIntensity";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::NotImplemented: return "NotImplemented";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::MissingOutcomeColumn: return "MissingOutcomeColumn";
    case ErrorCode::NoFeatureColumns: return "NoFeatureColumns";
    case ErrorCode::DuplicatePatient: return "DuplicatePatient";
    case ErrorCode::EverythingDropped: return "EverythingDropped";
    case ErrorCode::UnknownClass: return "UnknownClass";
    case ErrorCode::UnknownFeature: return "UnknownFeature";
    case ErrorCode::NotBinary: return "NotBinary";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::UnknownVolumeFeature: return "UnknownVolumeFeature";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::UnknownSubcommand: return "UnknownSubcommand";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

}  // namespace radgate
