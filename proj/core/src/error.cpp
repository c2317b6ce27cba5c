#include "ifrl/error.hpp"

namespace ifrl {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kEmptyKeyword: return "EmptyKeyword";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kNonPositiveLMax: return "NonPositiveLMax";
    case ErrorCode::kRcOutOfRange: return "RcOutOfRange";
    case ErrorCode::kNotNormalized: return "NotNormalized";
    case ErrorCode::kEmptyBatch: return "EmptyBatch";
    case ErrorCode::kBadPercent: return "BadPercent";
    case ErrorCode::kEmptySelection: return "EmptySelection";
    case ErrorCode::kGroupTooSmall: return "GroupTooSmall";
    case ErrorCode::kMissingAdvantage: return "MissingAdvantage";
    case ErrorCode::kBadTemperature: return "BadTemperature";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kInvalidRecord: return "InvalidRecord";
    case ErrorCode::kEmptyBase: return "EmptyBase";
    case ErrorCode::kUnsatisfiableTemplate: return "UnsatisfiableTemplate";
    case ErrorCode::kRatioOutOfRange: return "RatioOutOfRange";
    case ErrorCode::kClientError: return "ClientError";
    case ErrorCode::kEmptyField: return "EmptyField";
    case ErrorCode::kNoScoreFound: return "NoScoreFound";
    case ErrorCode::kScoreOutOfRange: return "ScoreOutOfRange";
    case ErrorCode::kTransport: return "Transport";
    case ErrorCode::kAuth: return "Auth";
    case ErrorCode::kRateLimited: return "RateLimited";
    case ErrorCode::kMalformedResponse: return "MalformedResponse";
    case ErrorCode::kSchema: return "Schema";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

bool is_client_error(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kClientError:
    case ErrorCode::kTransport:
    case ErrorCode::kAuth:
    case ErrorCode::kRateLimited:
    case ErrorCode::kMalformedResponse:
      return true;
    default:
      return false;
  }
}

}  // namespace ifrl
