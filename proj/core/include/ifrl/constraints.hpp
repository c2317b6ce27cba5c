#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace ifrl::constraints {

enum class ConstraintKind {
  kKeywordRange,    // n_min <= count <= n_max
  kKeywordAtMost,   // count <= n_min
  kKeywordAtLeast,  // count >= n_max
  kKeywordExact,    // count == n_exact
  kParagraphExact,
  kSentenceExact,
  kWordRange,
  kWordAtMost,      // count <= n_min
  kWordAtLeast,     // count >= n_max
  kBeginMatch,
  kEndMatch,
};

inline constexpr ConstraintKind kAllKinds[] = {
    ConstraintKind::kKeywordRange,   ConstraintKind::kKeywordAtMost,
    ConstraintKind::kKeywordAtLeast, ConstraintKind::kKeywordExact,
    ConstraintKind::kParagraphExact, ConstraintKind::kSentenceExact,
    ConstraintKind::kWordRange,      ConstraintKind::kWordAtMost,
    ConstraintKind::kWordAtLeast,    ConstraintKind::kBeginMatch,
    ConstraintKind::kEndMatch,
};

// Wire names, e.g. "keyword_range".
std::string_view to_string(ConstraintKind kind) noexcept;
std::optional<ConstraintKind> kind_from_string(std::string_view name) noexcept;

bool is_keyword_kind(ConstraintKind kind) noexcept;

enum class Language { kZh, kEn };

std::string_view to_string(Language language) noexcept;
std::optional<Language> language_from_string(std::string_view name) noexcept;

struct ConstraintItem {
  ConstraintKind kind = ConstraintKind::kKeywordRange;
  std::optional<std::string> keyword;
  std::optional<std::int64_t> n_min;
  std::optional<std::int64_t> n_max;
  std::optional<std::int64_t> n_exact;
  std::optional<std::string> pattern;
  bool case_sensitive = true;

  static ConstraintItem keyword_range(std::string keyword, std::int64_t lo, std::int64_t hi);
  static ConstraintItem keyword_at_most(std::string keyword, std::int64_t bound);
  static ConstraintItem keyword_at_least(std::string keyword, std::int64_t bound);
  static ConstraintItem keyword_exact(std::string keyword, std::int64_t n);
  static ConstraintItem paragraph_exact(std::int64_t n);
  static ConstraintItem sentence_exact(std::int64_t n);
  static ConstraintItem word_range(std::int64_t lo, std::int64_t hi);
  static ConstraintItem word_at_most(std::int64_t bound);
  static ConstraintItem word_at_least(std::int64_t bound);
  static ConstraintItem begin_match(std::string pattern);
  static ConstraintItem end_match(std::string pattern);

  friend bool operator==(const ConstraintItem&, const ConstraintItem&) = default;
};

struct ConstraintSpec {
  std::string spec_id;
  Language language = Language::kEn;
  std::vector<ConstraintItem> items;

  friend bool operator==(const ConstraintSpec&, const ConstraintSpec&) = default;
};

// Throw Error{kInvalidSpec} describing the first violated invariant.
void validate(const ConstraintItem& item);
void validate(const ConstraintSpec& spec);

using MeasuredValue = std::variant<std::int64_t, bool>;

struct ItemResult {
  ConstraintItem item;
  MeasuredValue measured;
  bool satisfied = false;
};

struct VerificationReport {
  std::vector<ItemResult> items;  // same order as the spec
  bool all_satisfied = false;
};

// Verifies a final answer (not the raw completion; see textstat::extract_answer).
VerificationReport verify(std::string_view answer, const ConstraintSpec& spec);

// Per-item reward in integer hundredths: 10 == 0.10.
int item_reward_hundredths(const ConstraintItem& item);
double item_reward(const ConstraintItem& item);

inline constexpr int kAllSatisfiedBonusHundredths = 100;

struct RewardBreakdown {
  std::vector<double> per_item;  // granted reward per item, 0 when unsatisfied
  double bonus = 0.0;            // 1.0 iff all items satisfied
  double achieved_sum = 0.0;
  double max_sum = 0.0;
  double r_c = 0.0;  // achieved_sum / max_sum, in [0, 1]
  std::int64_t achieved_hundredths = 0;
  std::int64_t max_hundredths = 0;
};

RewardBreakdown dense_reward(const VerificationReport& report);
double sparse_reward(const VerificationReport& report);

// ---- JSON (schema "spec_v1") ----------------------------------------------

inline constexpr std::string_view kSpecSchema = "spec_v1";

nlohmann::json to_json(const ConstraintItem& item);
nlohmann::json to_json(const ConstraintSpec& spec);
nlohmann::json to_json(const VerificationReport& report);
nlohmann::json to_json(const RewardBreakdown& reward);

// Parse and validate. Structural problems raise Error{kSchema}; invariant
// violations raise Error{kInvalidSpec}.
ConstraintItem item_from_json(const nlohmann::json& j);
ConstraintSpec spec_from_json(const nlohmann::json& j);

}  // namespace ifrl::constraints
