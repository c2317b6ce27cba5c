#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ifrl {

enum class ErrorCode {
  // textstat / constraints
  kEmptyKeyword,
  kInvalidSpec,
  // reward_shaping
  kNonPositiveLMax,
  kRcOutOfRange,
  // signal_math
  kNotNormalized,
  kEmptyBatch,
  kBadPercent,
  kEmptySelection,
  kGroupTooSmall,
  kMissingAdvantage,
  kBadTemperature,
  kInvalidArgument,
  kInvalidRecord,
  // synthesis
  kEmptyBase,
  kUnsatisfiableTemplate,
  kRatioOutOfRange,
  kClientError,
  // coldstart
  kEmptyField,
  kNoScoreFound,
  kScoreOutOfRange,
  // model_client
  kTransport,
  kAuth,
  kRateLimited,
  kMalformedResponse,
  // files
  kSchema,
  kIo,
};

std::string_view to_string(ErrorCode code) noexcept;

// Upstream-client failures (transport, auth, rate limit, malformed payloads).
bool is_client_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        message_(message) {}

  ErrorCode code() const noexcept { return code_; }
  // Message without the code prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace ifrl
