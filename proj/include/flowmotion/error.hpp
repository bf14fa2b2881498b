#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace flowmotion {

enum class ErrorCode {
  InvalidArgument,
  // sampling / fitting
  EmptySelection,
  InsufficientSamples,
  SingularDesign,
  DegenerateModel,
  EmptyInput,
  // synth
  InvalidSpec,
  UnknownPreset,
  // eval
  DimensionMismatch,
  EmptySequence,
  MissingFrame,
  // io
  BadMagic,
  TruncatedFile,
  NonPositiveDims,
  NonFiniteValues,
  IoFailure,
  BadHeader,
  BadPixelValue,
  ParseError,
  NonMonotoneIndices,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries a code so callers can branch
// on the kind of failure (e.g. fall back on degenerate fits) without string
// matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// True for the errors a sequence runner may recover from by reusing the
// previous frame's model.
inline bool is_fit_failure(ErrorCode code) noexcept {
  return code == ErrorCode::EmptySelection || code == ErrorCode::InsufficientSamples ||
         code == ErrorCode::SingularDesign || code == ErrorCode::DegenerateModel;
}

}  // namespace flowmotion
