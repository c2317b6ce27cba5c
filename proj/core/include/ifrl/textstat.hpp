#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>

// Unicode-aware segmentation and counting primitives used by constraint
// verification. Input is UTF-8; malformed bytes are treated as punctuation.
// Every function here is pure and thread-safe.
namespace ifrl::textstat {

inline constexpr std::string_view kThinkOpen = "<think>";
inline constexpr std::string_view kThinkClose = "</think>";

struct AnswerSplit {
  std::string reasoning;
  std::string answer;
  bool had_think_block = false;

  friend bool operator==(const AnswerSplit&, const AnswerSplit&) = default;
};

// Splits a raw completion into its think-block content and the final answer.
//
// When a `<think>...</think>` block is present, `reasoning` is the inner content
// of the first block and `answer` is everything after the last `</think>`, with
// leading whitespace removed. A dangling `<think>` left in that tail (an
// unterminated block) is cut off so the answer never carries delimiters.
// Without a well-formed block the raw text is returned unchanged as the answer.
AnswerSplit extract_answer(std::string_view raw);

// One unit per CJK ideograph/kana, one per maximal run of other letters, digits
// and apostrophes (a run of apostrophes alone is not a word).
std::size_t count_words(std::string_view text);

// Segments end at . ! ? 。 ！ ？ … (a '.' between two ASCII digits does not end
// one). A segment counts only if it contains a word character, so runs such as
// "?!" or "..." close a single sentence. A trailing unterminated segment counts.
std::size_t count_sentences(std::string_view text);

// Blocks of non-blank lines separated by one or more whitespace-only lines.
std::size_t count_paragraphs(std::string_view text);

// Non-overlapping occurrences of `keyword`. Keywords containing a CJK character
// match as plain substrings; all other keywords must sit on word boundaries.
// Throws Error{kEmptyKeyword} when keyword is empty.
std::size_t count_keyword(std::string_view text, std::string_view keyword,
                          bool case_sensitive = true);

// Proxy token count: words plus visible punctuation symbols.
std::size_t approx_token_count(std::string_view text);

std::size_t code_point_length(std::string_view text);

// Injectable text -> length function (thinking check, length reward).
using TokenCounter = std::function<std::size_t(std::string_view)>;

inline TokenCounter default_token_counter() { return &approx_token_count; }

std::string_view trim_left(std::string_view text) noexcept;
std::string_view trim_right(std::string_view text) noexcept;

}  // namespace ifrl::textstat
