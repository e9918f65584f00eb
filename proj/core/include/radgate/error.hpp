#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace radgate {

enum class ErrorCode {
  // dicom
  MissingMagic,
  UnsupportedTransferSyntax,
  TruncatedElement,
  MalformedElement,
  TagAbsent,
  MalformedNumeric,
  MissingGeometry,
  PixelLengthMismatch,
  UnsupportedBitsAllocated,
  NotRtStruct,
  NoContours,
  OddContourData,
  // catalog / qc
  EmptyDataset,
  MixedSeriesGeometry,
  // volume io
  SingleSlice,
  BadHeader,
  SizeMismatch,
  GeometryMismatch,
  NonRepresentable,
  // preprocess
  DegenerateIntensity,
  InvalidParameter,
  NotImplemented,
  // features
  EmptyMask,
  // analysis
  MissingOutcomeColumn,
  NoFeatureColumns,
  DuplicatePatient,
  EverythingDropped,
  UnknownClass,
  UnknownFeature,
  NotBinary,
  TooFewSamples,
  UnknownVolumeFeature,
  // cli / plumbing
  ConfigInvalid,
  UnknownSubcommand,
  IoFailure,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception type used across the library. The code is stable and meant for
/// programmatic checks; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Error raised by a preprocessing chain; carries the 1-based step index.
class StepError : public Error {
 public:
  StepError(const Error& cause, std::size_t step, std::string_view step_name)
      : Error(cause.code(), "step " + std::to_string(step) + " (" + std::string(step_name) +
                                "): " + cause.what()),
        step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace radgate
