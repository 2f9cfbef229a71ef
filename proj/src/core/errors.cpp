#include "kpeval/errors.hpp"

namespace kpeval {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::InvalidIndex: return "InvalidIndex";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicateFrameId: return "DuplicateFrameId";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::SequenceMismatch: return "SequenceMismatch";
    case ErrorCode::DegenerateScale: return "DegenerateScale";
    case ErrorCode::NoCommonKeypoints: return "NoCommonKeypoints";
    case ErrorCode::NoNormalizer: return "NoNormalizer";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace kpeval
