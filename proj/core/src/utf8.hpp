#pragma once

#include <string>
#include <string_view>

namespace ifrl::utf8 {

// Malformed sequences decode to U+FFFD, one code point per offending byte.
std::u32string decode(std::string_view text);
std::string encode(std::u32string_view text);

enum class CharClass {
  kSpace,
  kCjk,         // ideographs and kana: one word unit per code point
  kWord,        // non-CJK letters, digits and combining marks
  kApostrophe,  // joins word runs but never starts a word on its own
  kIgnorable,   // zero-width format characters, BOM, variation selectors
  kPunct,       // everything else that is visible
};

CharClass classify(char32_t c) noexcept;

inline bool is_space(char32_t c) noexcept { return classify(c) == CharClass::kSpace; }
inline bool is_cjk(char32_t c) noexcept { return classify(c) == CharClass::kCjk; }
// Letter/digit outside CJK; used for whole-word boundaries.
inline bool is_word(char32_t c) noexcept { return classify(c) == CharClass::kWord; }

bool is_sentence_terminator(char32_t c) noexcept;
bool is_ascii_digit(char32_t c) noexcept;

// Simple one-to-one lowercase mapping for Latin, Greek, Cyrillic and fullwidth Latin.
char32_t fold_case(char32_t c) noexcept;

}  // namespace ifrl::utf8
