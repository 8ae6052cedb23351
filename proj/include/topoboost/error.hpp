#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace topoboost {

enum class ErrorCode {
  InvalidArgument,
  NonFiniteDistance,
  InvalidFiltration,
  BadChannelCount,
  NonFiniteFeature,
  LabelOutOfRange,
  EmptyDataset,
  SingleClassDataset,
  FeatureCountMismatch,
  LengthMismatch,
  EmptyInput,
  ShapeMismatch,
  NoClasses,
  UnreadableImage,
  ParseError,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Library-wide exception. Every failure a caller can trigger with bad data
/// carries one of the codes above; the CLI maps all of them to exit status 2.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace topoboost
