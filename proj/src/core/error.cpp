#include "glossrank/error.hpp"

namespace glossrank {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kMalformedRecord: return "MalformedRecord";
    case ErrorCode::kEmptyInventory: return "EmptyInventory";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kNonFiniteInput: return "NonFiniteInput";
    case ErrorCode::kEmptyField: return "EmptyField";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kEmptyDefinitions: return "EmptyDefinitions";
    case ErrorCode::kEmptyCandidates: return "EmptyCandidates";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kSupportMismatch: return "SupportMismatch";
    case ErrorCode::kInvalidDistribution: return "InvalidDistribution";
    case ErrorCode::kGoldNotInSupport: return "GoldNotInSupport";
    case ErrorCode::kBadHeader: return "BadHeader";
    case ErrorCode::kNormOutOfTolerance: return "NormOutOfTolerance";
    case ErrorCode::kMissingKey: return "MissingKey";
    case ErrorCode::kMissingPair: return "MissingPair";
    case ErrorCode::kEmptyTarget: return "EmptyTarget";
    case ErrorCode::kServiceUnavailable: return "ServiceUnavailable";
    case ErrorCode::kEmptySample: return "EmptySample";
    case ErrorCode::kCacheWrite: return "CacheWrite";
    case ErrorCode::kNoDefinitionsAvailable: return "NoDefinitionsAvailable";
    case ErrorCode::kUnknownSense: return "UnknownSense";
    case ErrorCode::kMalformedLine: return "MalformedLine";
    case ErrorCode::kGoldLengthMismatch: return "GoldLengthMismatch";
    case ErrorCode::kGoldNotAmongCandidates: return "GoldNotAmongCandidates";
    case ErrorCode::kMissingGold: return "MissingGold";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kInstanceSetMismatch: return "InstanceSetMismatch";
    case ErrorCode::kEmptyResults: return "EmptyResults";
    case ErrorCode::kIOError: return "IOError";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

}  // namespace glossrank
