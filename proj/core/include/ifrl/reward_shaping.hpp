#pragma once

#include <cstdint>

// Length shaping for zero-RL rollouts: a cosine ramp that rewards long correct
// answers, penalises long wrong ones, and applies a flat -2 past the budget.
namespace ifrl::reward_shaping {

inline constexpr double kDefaultCorrectnessThreshold = 0.2;
inline constexpr double kOverlengthPenalty = -2.0;

struct LengthRewardParams {
  std::int64_t l_max = 0;  // token budget, > 0
  double r_c_threshold = kDefaultCorrectnessThreshold;
};

void validate(const LengthRewardParams& params);

// 0.5 * (1 - cos(pi * min(l, l_max) / l_max)); 0 at l = 0, 1 at l = l_max.
// Throws Error{kNonPositiveLMax} if l_max <= 0 and Error{kInvalidArgument} if l < 0.
double gamma(std::int64_t l, std::int64_t l_max);

// -2 when l >= l_max; 2 * r_c * gamma(l) when r_c >= threshold; -gamma(l) otherwise.
// Throws Error{kRcOutOfRange} unless 0 <= r_c <= 1.
double length_reward(double r_c, std::int64_t l, const LengthRewardParams& params);

double total_reward(double r_c, double r_l) noexcept;
double total_reward(double r_c, double r_l, double weight_c, double weight_l) noexcept;

}  // namespace ifrl::reward_shaping
