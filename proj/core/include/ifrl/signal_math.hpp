#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

// Per-token training-signal kernels: entropy-preserving SFT token selection,
// group-relative advantages, and the token-wise entropy-adaptive (TEA)
// regulariser. Records carry precomputed per-token statistics; the kernels are
// pure and order-independent up to the documented tie rule.
namespace ifrl::signal {

inline constexpr double kDefaultRPercent = 80.0;
inline constexpr double kDefaultAlpha = 0.8;
inline constexpr double kDefaultTau = 1.0;
inline constexpr double kDefaultLambda = 0.05;
inline constexpr double kDefaultCap = 100.0;
inline constexpr std::size_t kDefaultReportTopK = 200;
inline constexpr std::size_t kDefaultReportMinFreq = 100;

// Tolerance for the nll == -logp record invariant.
inline constexpr double kNllLogpTolerance = 1e-6;
// Group reward std below this yields all-zero advantages.
inline constexpr double kMinGroupStd = 1e-8;

struct TokenKey {
  std::string sample_id;
  std::int64_t position = 0;

  friend auto operator<=>(const TokenKey&, const TokenKey&) = default;
  friend bool operator==(const TokenKey&, const TokenKey&) = default;
};

struct TokenRecord {
  std::string sample_id;
  std::int64_t position = 0;
  std::int64_t token_id = 0;
  std::optional<std::string> token_text;
  double nll = 0.0;      // -log p(chosen token)
  double entropy = 0.0;  // entropy of the full predictive distribution
  double logp = 0.0;     // log p(chosen token)
  std::optional<double> advantage;

  TokenKey key() const { return {sample_id, position}; }
};

// Error{kInvalidRecord} on non-finite values, negative nll/entropy, positive
// logp, or |nll + logp| > kNllLogpTolerance.
void validate(const TokenRecord& record);
// Per-record checks plus uniqueness of (sample_id, position).
void validate_batch(std::span<const TokenRecord> batch);

// Neumaier-compensated sum; result does not depend on input order beyond ~1 ulp.
double compensated_sum(std::span<const double> values);
double compensated_mean(std::span<const double> values);

// -sum p log p (natural log, 0 log 0 = 0). Throws Error{kNotNormalized} when any
// entry is negative or the entries do not sum to 1 within 1e-6.
double entropy(std::span<const double> dist);

// Linear-interpolation quantile over order statistics x_(0..n-1):
// h = (n-1) q, x_lo + (h - lo) * (x_hi - x_lo).
double quantile_linear(std::span<const double> values, double q);

// How r_percent maps onto the quantile threshold.
enum class QuantileReading {
  kSelectedFraction,  // r% of tokens are selected; threshold at the (1 - r/100)-quantile
  kLiteral,           // threshold at the r/100-quantile, selecting ~(100 - r)%
};

struct SelectionResult {
  double threshold = 0.0;
  std::vector<TokenKey> selected;  // sorted by (sample_id, position)
  double selected_fraction = 0.0;
  std::size_t tie_admitted = 0;  // tokens at the threshold admitted by the tie rule
  double r_percent = kDefaultRPercent;
  double alpha = kDefaultAlpha;
};

inline double selection_score(const TokenRecord& r, double alpha) { return r.nll - alpha * r.entropy; }

// Selects tokens whose score nll - alpha * entropy strictly exceeds the quantile
// threshold. If that leaves fewer than round(fraction * N) tokens, tokens scoring
// exactly the threshold are admitted in (sample_id, position) order until the
// target count is reached.
SelectionResult sft_select(std::span<const TokenRecord> batch, double r_percent, double alpha,
                           QuantileReading reading = QuantileReading::kSelectedFraction);

// Mean nll over the selected tokens. Throws Error{kEmptySelection}.
double entropy_sft_loss(std::span<const TokenRecord> batch, const SelectionResult& selection);

// (r_i - mean) / std with population std; all zeros when std < kMinGroupStd.
std::vector<double> grpo_advantages(std::span<const double> group_rewards);

// Scope over which the logp and advantage means are taken.
enum class CovarianceScope { kBatch, kSequence };

std::vector<double> tea_covariance(std::span<const TokenRecord> records,
                                   CovarianceScope scope = CovarianceScope::kBatch);

// Numerically stable softmax of values / tau.
std::vector<double> softmax(std::span<const double> values, double tau);

// min(softmax(cov / tau)_t, c / |T|).
std::vector<double> tea_coefficients(std::span<const double> cov, double tau, double c);

struct TeaResult {
  std::vector<double> covariances;
  std::vector<double> coefficients;
  double l_tea = 0.0;
};

// |T| * sum_t w_t * H_t.
TeaResult tea_loss(std::span<const TokenRecord> records, double tau, double c,
                   CovarianceScope scope = CovarianceScope::kBatch);

// l_grpo - lambda * l_tea.
double combined_objective(double l_grpo, double l_tea, double lambda);

struct EntropyReportRow {
  std::string token_text;
  double mean_entropy = 0.0;
  std::size_t frequency = 0;

  friend bool operator==(const EntropyReportRow&, const EntropyReportRow&) = default;
};

// Groups by token_text (records without text are skipped), keeps groups seen at
// least min_freq times, and ranks by mean entropy desc, frequency desc, text asc.
std::vector<EntropyReportRow> token_entropy_report(std::span<const TokenRecord> records,
                                                   std::size_t top_k = kDefaultReportTopK,
                                                   std::size_t min_freq = kDefaultReportMinFreq);

}  // namespace ifrl::signal
