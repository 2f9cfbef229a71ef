#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kpeval {

enum class ErrorCode {
  SchemaMismatch,
  InvalidIndex,
  ParseError,
  DuplicateFrameId,
  EmptyDataset,
  SequenceMismatch,
  DegenerateScale,
  NoCommonKeypoints,
  NoNormalizer,
  InsufficientData,
  ZeroVariance,
  InvalidArgument,
  IoError,
  ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the toolkit. The message carries the locus
/// (file, line or record) when one is known.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace kpeval
