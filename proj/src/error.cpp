#include "flowmotion/error.hpp"

namespace flowmotion {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EmptySelection: return "EmptySelection";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::SingularDesign: return "SingularDesign";
    case ErrorCode::DegenerateModel: return "DegenerateModel";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::UnknownPreset: return "UnknownPreset";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptySequence: return "EmptySequence";
    case ErrorCode::MissingFrame: return "MissingFrame";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::NonPositiveDims: return "NonPositiveDims";
    case ErrorCode::NonFiniteValues: return "NonFiniteValues";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::BadHeader: return "BadHeader";
    case ErrorCode::BadPixelValue: return "BadPixelValue";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonMonotoneIndices: return "NonMonotoneIndices";
  }
  return "Unknown";
}

}  // namespace flowmotion
