#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spectrosat {

enum class ErrorCode {
  // linelist
  RecordTooShort,
  FieldNotNumeric,
  FieldOutOfRange,
  EmptyCatalog,
  IoFailure,
  InvalidBand,
  // radtran
  InvalidArgument,
  DegenerateProfile,
  MissingLines,
  // instrument
  MissingNoiseSpec,
  BandMismatch,
  NyquistViolation,
  // dsp
  EmptyInput,
  IncompatibleFrames,
  GridMismatch,
  ZeroReference,
  BandOutOfRange,
  DegenerateBand,
  DegenerateNoise,
  // retrieval
  NegativeTransmittance,
  SaturatedBand,
  ZeroOxygenColumn,
  MissingO2Band,
  // config
  ParseError,
  ValidationError,
  UnknownKey,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::RecordTooShort: return "RecordTooShort";
    case ErrorCode::FieldNotNumeric: return "FieldNotNumeric";
    case ErrorCode::FieldOutOfRange: return "FieldOutOfRange";
    case ErrorCode::EmptyCatalog: return "EmptyCatalog";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::InvalidBand: return "InvalidBand";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DegenerateProfile: return "DegenerateProfile";
    case ErrorCode::MissingLines: return "MissingLines";
    case ErrorCode::MissingNoiseSpec: return "MissingNoiseSpec";
    case ErrorCode::BandMismatch: return "BandMismatch";
    case ErrorCode::NyquistViolation: return "NyquistViolation";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::IncompatibleFrames: return "IncompatibleFrames";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::ZeroReference: return "ZeroReference";
    case ErrorCode::BandOutOfRange: return "BandOutOfRange";
    case ErrorCode::DegenerateBand: return "DegenerateBand";
    case ErrorCode::DegenerateNoise: return "DegenerateNoise";
    case ErrorCode::NegativeTransmittance: return "NegativeTransmittance";
    case ErrorCode::SaturatedBand: return "SaturatedBand";
    case ErrorCode::ZeroOxygenColumn: return "ZeroOxygenColumn";
    case ErrorCode::MissingO2Band: return "MissingO2Band";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::UnknownKey: return "UnknownKey";
  }
  return "Unknown";
}

/// Every failure in the toolkit is reported as an Error carrying a stable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace spectrosat
