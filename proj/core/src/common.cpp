#include "ahc/common.hpp"

namespace ahc {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NoSplits: return "NoSplits";
    case ErrorCode::InvalidBands: return "InvalidBands";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DegenerateSample: return "DegenerateSample";
    case ErrorCode::DegenerateFeatures: return "DegenerateFeatures";
    case ErrorCode::NoQualifyingClusters: return "NoQualifyingClusters";
    case ErrorCode::SplitFailed: return "SplitFailed";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace ahc
