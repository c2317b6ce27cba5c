#include "ifrl/constraints.hpp"

#include <array>
#include <optional>
#include <utility>

#include "ifrl/error.hpp"
#include "ifrl/textstat.hpp"

namespace ifrl::constraints {
namespace {

constexpr std::array<std::pair<ConstraintKind, std::string_view>, 11> kKindNames{{
    {ConstraintKind::kKeywordRange, "keyword_range"},
    {ConstraintKind::kKeywordAtMost, "keyword_at_most"},
    {ConstraintKind::kKeywordAtLeast, "keyword_at_least"},
    {ConstraintKind::kKeywordExact, "keyword_exact"},
    {ConstraintKind::kParagraphExact, "paragraph_exact"},
    {ConstraintKind::kSentenceExact, "sentence_exact"},
    {ConstraintKind::kWordRange, "word_range"},
    {ConstraintKind::kWordAtMost, "word_at_most"},
    {ConstraintKind::kWordAtLeast, "word_at_least"},
    {ConstraintKind::kBeginMatch, "begin_match"},
    {ConstraintKind::kEndMatch, "end_match"},
}};

[[noreturn]] void invalid(const ConstraintItem& item, const std::string& what) {
  throw Error(ErrorCode::kInvalidSpec, std::string(to_string(item.kind)) + ": " + what);
}

std::int64_t require(const ConstraintItem& item, const std::optional<std::int64_t>& v,
                     const char* field) {
  if (!v) invalid(item, std::string("missing ") + field);
  if (*v < 0) invalid(item, std::string(field) + " must be non-negative");
  return *v;
}

// Counters are evaluated at most once per verify() call.
class AnswerStats {
 public:
  explicit AnswerStats(std::string_view answer) : answer_(answer) {}

  std::int64_t words() { return cached(words_, [&] { return textstat::count_words(answer_); }); }
  std::int64_t sentences() {
    return cached(sentences_, [&] { return textstat::count_sentences(answer_); });
  }
  std::int64_t paragraphs() {
    return cached(paragraphs_, [&] { return textstat::count_paragraphs(answer_); });
  }
  std::int64_t keyword(const ConstraintItem& item) {
    return static_cast<std::int64_t>(
        textstat::count_keyword(answer_, *item.keyword, item.case_sensitive));
  }
  std::string_view answer() const { return answer_; }

 private:
  template <typename F>
  static std::int64_t cached(std::int64_t& slot, F&& compute) {
    if (slot < 0) slot = static_cast<std::int64_t>(compute());
    return slot;
  }

  std::string_view answer_;
  std::int64_t words_ = -1;  // -1 until computed
  std::int64_t sentences_ = -1;
  std::int64_t paragraphs_ = -1;
};

ItemResult evaluate(const ConstraintItem& item, AnswerStats& stats) {
  ItemResult r{item, std::int64_t{0}, false};
  auto count_check = [&](std::int64_t count) {
    r.measured = count;
    switch (item.kind) {
      case ConstraintKind::kKeywordRange:
      case ConstraintKind::kWordRange:
        r.satisfied = *item.n_min <= count && count <= *item.n_max;
        break;
      case ConstraintKind::kKeywordAtMost:
      case ConstraintKind::kWordAtMost:
        r.satisfied = count <= *item.n_min;
        break;
      case ConstraintKind::kKeywordAtLeast:
      case ConstraintKind::kWordAtLeast:
        r.satisfied = count >= *item.n_max;
        break;
      default:
        r.satisfied = count == *item.n_exact;
        break;
    }
  };

  switch (item.kind) {
    case ConstraintKind::kKeywordRange:
    case ConstraintKind::kKeywordAtMost:
    case ConstraintKind::kKeywordAtLeast:
    case ConstraintKind::kKeywordExact:
      count_check(stats.keyword(item));
      break;
    case ConstraintKind::kParagraphExact:
      count_check(stats.paragraphs());
      break;
    case ConstraintKind::kSentenceExact:
      count_check(stats.sentences());
      break;
    case ConstraintKind::kWordRange:
    case ConstraintKind::kWordAtMost:
    case ConstraintKind::kWordAtLeast:
      count_check(stats.words());
      break;
    case ConstraintKind::kBeginMatch: {
      const bool ok = textstat::trim_left(stats.answer()).starts_with(*item.pattern);
      r.measured = ok;
      r.satisfied = ok;
      break;
    }
    case ConstraintKind::kEndMatch: {
      const bool ok = textstat::trim_right(stats.answer()).ends_with(*item.pattern);
      r.measured = ok;
      r.satisfied = ok;
      break;
    }
  }
  return r;
}

}  // namespace

std::string_view to_string(ConstraintKind kind) noexcept {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<ConstraintKind> kind_from_string(std::string_view name) noexcept {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

bool is_keyword_kind(ConstraintKind kind) noexcept {
  return kind == ConstraintKind::kKeywordRange || kind == ConstraintKind::kKeywordAtMost ||
         kind == ConstraintKind::kKeywordAtLeast || kind == ConstraintKind::kKeywordExact;
}

std::string_view to_string(Language language) noexcept {
  return language == Language::kZh ? "zh" : "en";
}

std::optional<Language> language_from_string(std::string_view name) noexcept {
  if (name == "zh") return Language::kZh;
  if (name == "en") return Language::kEn;
  return std::nullopt;
}

ConstraintItem ConstraintItem::keyword_range(std::string keyword, std::int64_t lo,
                                             std::int64_t hi) {
  ConstraintItem item;
  item.kind = ConstraintKind::kKeywordRange;
  item.keyword = std::move(keyword);
  item.n_min = lo;
  item.n_max = hi;
  return item;
}

ConstraintItem ConstraintItem::keyword_at_most(std::string keyword, std::int64_t bound) {
  ConstraintItem item;
  item.kind = ConstraintKind::kKeywordAtMost;
  item.keyword = std::move(keyword);
  item.n_min = bound;
  return item;
}

ConstraintItem ConstraintItem::keyword_at_least(std::string keyword, std::int64_t bound) {
  ConstraintItem item;
  item.kind = ConstraintKind::kKeywordAtLeast;
  item.keyword = std::move(keyword);
  item.n_max = bound;
  return item;
}

ConstraintItem ConstraintItem::keyword_exact(std::string keyword, std::int64_t n) {
  ConstraintItem item;
  item.kind = ConstraintKind::kKeywordExact;
  item.keyword = std::move(keyword);
  item.n_exact = n;
  return item;
}

ConstraintItem ConstraintItem::paragraph_exact(std::int64_t n) {
  ConstraintItem item;
  item.kind = ConstraintKind::kParagraphExact;
  item.n_exact = n;
  return item;
}

ConstraintItem ConstraintItem::sentence_exact(std::int64_t n) {
  ConstraintItem item;
  item.kind = ConstraintKind::kSentenceExact;
  item.n_exact = n;
  return item;
}

ConstraintItem ConstraintItem::word_range(std::int64_t lo, std::int64_t hi) {
  ConstraintItem item;
  item.kind = ConstraintKind::kWordRange;
  item.n_min = lo;
  item.n_max = hi;
  return item;
}

ConstraintItem ConstraintItem::word_at_most(std::int64_t bound) {
  ConstraintItem item;
  item.kind = ConstraintKind::kWordAtMost;
  item.n_min = bound;
  return item;
}

ConstraintItem ConstraintItem::word_at_least(std::int64_t bound) {
  ConstraintItem item;
  item.kind = ConstraintKind::kWordAtLeast;
  item.n_max = bound;
  return item;
}

ConstraintItem ConstraintItem::begin_match(std::string pattern) {
  ConstraintItem item;
  item.kind = ConstraintKind::kBeginMatch;
  item.pattern = std::move(pattern);
  return item;
}

ConstraintItem ConstraintItem::end_match(std::string pattern) {
  ConstraintItem item;
  item.kind = ConstraintKind::kEndMatch;
  item.pattern = std::move(pattern);
  return item;
}

void validate(const ConstraintItem& item) {
  if (is_keyword_kind(item.kind) && (!item.keyword || item.keyword->empty())) {
    invalid(item, "keyword must be non-empty");
  }
  switch (item.kind) {
    case ConstraintKind::kKeywordRange:
    case ConstraintKind::kWordRange: {
      const auto lo = require(item, item.n_min, "n_min");
      const auto hi = require(item, item.n_max, "n_max");
      if (lo > hi) invalid(item, "n_min > n_max");
      break;
    }
    case ConstraintKind::kKeywordAtMost:
    case ConstraintKind::kWordAtMost:
      require(item, item.n_min, "n_min");
      break;
    case ConstraintKind::kKeywordAtLeast:
    case ConstraintKind::kWordAtLeast:
      require(item, item.n_max, "n_max");
      break;
    case ConstraintKind::kKeywordExact:
    case ConstraintKind::kParagraphExact:
    case ConstraintKind::kSentenceExact:
      require(item, item.n_exact, "n_exact");
      break;
    case ConstraintKind::kBeginMatch:
    case ConstraintKind::kEndMatch:
      if (!item.pattern || item.pattern->empty()) invalid(item, "pattern must be non-empty");
      break;
  }
}

void validate(const ConstraintSpec& spec) {
  if (spec.spec_id.empty()) throw Error(ErrorCode::kInvalidSpec, "spec_id must be non-empty");
  if (spec.items.empty()) {
    throw Error(ErrorCode::kInvalidSpec, "spec '" + spec.spec_id + "' has no items");
  }
  int begins = 0;
  int ends = 0;
  for (const auto& item : spec.items) {
    validate(item);
    begins += item.kind == ConstraintKind::kBeginMatch;
    ends += item.kind == ConstraintKind::kEndMatch;
  }
  if (begins > 1 || ends > 1) {
    throw Error(ErrorCode::kInvalidSpec,
                "spec '" + spec.spec_id + "' has more than one begin_match or end_match");
  }
}

VerificationReport verify(std::string_view answer, const ConstraintSpec& spec) {
  validate(spec);
  AnswerStats stats(answer);
  VerificationReport report;
  report.items.reserve(spec.items.size());
  report.all_satisfied = true;
  for (const auto& item : spec.items) {
    report.items.push_back(evaluate(item, stats));
    report.all_satisfied = report.all_satisfied && report.items.back().satisfied;
  }
  return report;
}

int item_reward_hundredths(const ConstraintItem& item) {
  validate(item);
  switch (item.kind) {
    case ConstraintKind::kKeywordRange:
      return *item.n_max < 5 ? 10 : 20;
    case ConstraintKind::kKeywordAtMost:
    case ConstraintKind::kKeywordAtLeast:
      return 5;
    case ConstraintKind::kKeywordExact:
    case ConstraintKind::kParagraphExact:
      return 10;
    case ConstraintKind::kSentenceExact:
      return 20;
    case ConstraintKind::kWordRange:
      return (*item.n_max - *item.n_min) > 50 ? 10 : 20;
    case ConstraintKind::kWordAtMost:
    case ConstraintKind::kWordAtLeast:
      return 5;
    case ConstraintKind::kBeginMatch:
    case ConstraintKind::kEndMatch:
      return 2;
  }
  return 0;
}

double item_reward(const ConstraintItem& item) { return item_reward_hundredths(item) / 100.0; }

RewardBreakdown dense_reward(const VerificationReport& report) {
  RewardBreakdown out;
  out.per_item.reserve(report.items.size());
  for (const auto& r : report.items) {
    const int h = item_reward_hundredths(r.item);
    out.max_hundredths += h;
    if (r.satisfied) {
      out.achieved_hundredths += h;
      out.per_item.push_back(h / 100.0);
    } else {
      out.per_item.push_back(0.0);
    }
  }
  out.max_hundredths += kAllSatisfiedBonusHundredths;
  if (report.all_satisfied) {
    out.achieved_hundredths += kAllSatisfiedBonusHundredths;
    out.bonus = 1.0;
  }
  out.achieved_sum = static_cast<double>(out.achieved_hundredths) / 100.0;
  out.max_sum = static_cast<double>(out.max_hundredths) / 100.0;
  out.r_c = static_cast<double>(out.achieved_hundredths) /
            static_cast<double>(out.max_hundredths);
  return out;
}

double sparse_reward(const VerificationReport& report) { return report.all_satisfied ? 1.0 : 0.0; }

}  // namespace ifrl::constraints
