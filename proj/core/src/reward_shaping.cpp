#include "ifrl/reward_shaping.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ifrl/error.hpp"

namespace ifrl::reward_shaping {

void validate(const LengthRewardParams& params) {
  if (params.l_max <= 0) {
    throw Error(ErrorCode::kNonPositiveLMax, "l_max must be positive, got " +
                                                 std::to_string(params.l_max));
  }
  if (!(params.r_c_threshold >= 0.0 && params.r_c_threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "r_c_threshold must lie in [0, 1]");
  }
}

double gamma(std::int64_t l, std::int64_t l_max) {
  if (l_max <= 0) {
    throw Error(ErrorCode::kNonPositiveLMax, "l_max must be positive, got " + std::to_string(l_max));
  }
  if (l < 0) throw Error(ErrorCode::kInvalidArgument, "length must be non-negative");
  const double ratio = static_cast<double>(std::min(l, l_max)) / static_cast<double>(l_max);
  return 0.5 * (1.0 - std::cos(std::numbers::pi * ratio));
}

double length_reward(double r_c, std::int64_t l, const LengthRewardParams& params) {
  validate(params);
  if (!(r_c >= 0.0 && r_c <= 1.0)) {
    throw Error(ErrorCode::kRcOutOfRange, "r_c must lie in [0, 1], got " + std::to_string(r_c));
  }
  if (l < 0) throw Error(ErrorCode::kInvalidArgument, "length must be non-negative");
  if (l >= params.l_max) return kOverlengthPenalty;
  const double g = gamma(l, params.l_max);
  return r_c >= params.r_c_threshold ? 2.0 * r_c * g : -g;
}

double total_reward(double r_c, double r_l) noexcept { return r_c + r_l; }

double total_reward(double r_c, double r_l, double weight_c, double weight_l) noexcept {
  return weight_c * r_c + weight_l * r_l;
}

}  // namespace ifrl::reward_shaping
