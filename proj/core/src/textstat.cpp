#include "ifrl/textstat.hpp"

#include <algorithm>

#include "ifrl/error.hpp"
#include "utf8.hpp"

namespace ifrl::textstat {
namespace {

using utf8::CharClass;

bool is_ascii_space(char c) noexcept {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_blank_line(std::u32string_view line) {
  return std::all_of(line.begin(), line.end(), [](char32_t c) {
    const auto cls = utf8::classify(c);
    return cls == CharClass::kSpace || cls == CharClass::kIgnorable;
  });
}

// Shared scan for words and punctuation so approx_token_count stays consistent
// with count_words.
struct WordScan {
  std::size_t words = 0;
  std::size_t punct = 0;
};

WordScan scan_words(std::u32string_view text) {
  WordScan out;
  bool in_run = false;
  bool run_has_word = false;
  std::size_t run_apostrophes = 0;

  auto close_run = [&] {
    if (in_run) {
      if (run_has_word) {
        ++out.words;
      } else {
        out.punct += run_apostrophes;
      }
    }
    in_run = false;
    run_has_word = false;
    run_apostrophes = 0;
  };

  for (char32_t c : text) {
    switch (utf8::classify(c)) {
      case CharClass::kWord:
        in_run = true;
        run_has_word = true;
        break;
      case CharClass::kApostrophe:
        in_run = true;
        ++run_apostrophes;
        break;
      case CharClass::kIgnorable:
        break;
      case CharClass::kCjk:
        close_run();
        ++out.words;
        break;
      case CharClass::kPunct:
        close_run();
        ++out.punct;
        break;
      case CharClass::kSpace:
        close_run();
        break;
    }
  }
  close_run();
  return out;
}

bool contains_cjk(std::u32string_view text) {
  return std::any_of(text.begin(), text.end(), utf8::is_cjk);
}

bool is_boundary(std::u32string_view text, std::size_t index) {
  // Index is one-past or one-before the candidate match; out of range is a boundary.
  if (index >= text.size()) return true;
  const auto cls = utf8::classify(text[index]);
  return cls != CharClass::kWord;
}

}  // namespace

std::string_view trim_left(std::string_view text) noexcept {
  // Skips ASCII whitespace plus Unicode spaces such as U+3000 and NBSP.
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t len = 0;
    const auto b = static_cast<unsigned char>(text[i]);
    if (b < 0x80) {
      if (!is_ascii_space(text[i])) break;
      ++i;
      continue;
    }
    len = (b & 0xE0) == 0xC0 ? 2 : (b & 0xF0) == 0xE0 ? 3 : (b & 0xF8) == 0xF0 ? 4 : 1;
    const auto cps = utf8::decode(text.substr(i, len));
    if (cps.size() != 1 || !(utf8::is_space(cps[0]) ||
                             utf8::classify(cps[0]) == CharClass::kIgnorable)) {
      break;
    }
    i += len;
  }
  return text.substr(i);
}

std::string_view trim_right(std::string_view text) noexcept {
  std::size_t end = text.size();
  while (end > 0) {
    const auto b = static_cast<unsigned char>(text[end - 1]);
    if (b < 0x80) {
      if (!is_ascii_space(text[end - 1])) break;
      --end;
      continue;
    }
    // Walk back to the lead byte of this code point.
    std::size_t start = end - 1;
    while (start > 0 && (static_cast<unsigned char>(text[start]) & 0xC0) == 0x80 &&
           end - start < 4) {
      --start;
    }
    const auto cps = utf8::decode(text.substr(start, end - start));
    if (cps.size() != 1 || !(utf8::is_space(cps[0]) ||
                             utf8::classify(cps[0]) == CharClass::kIgnorable)) {
      break;
    }
    end = start;
  }
  return text.substr(0, end);
}

AnswerSplit extract_answer(std::string_view raw) {
  AnswerSplit out;
  const auto open = raw.find(kThinkOpen);
  if (open == std::string_view::npos) {
    out.answer = std::string(raw);
    return out;
  }
  const auto inner_begin = open + kThinkOpen.size();
  const auto first_close = raw.find(kThinkClose, inner_begin);
  if (first_close == std::string_view::npos) {
    out.answer = std::string(raw);
    return out;
  }
  out.had_think_block = true;
  out.reasoning = std::string(raw.substr(inner_begin, first_close - inner_begin));

  const auto last_close = raw.rfind(kThinkClose);
  auto tail = trim_left(raw.substr(last_close + kThinkClose.size()));
  if (const auto dangling = tail.find(kThinkOpen); dangling != std::string_view::npos) {
    tail = trim_right(tail.substr(0, dangling));
  }
  out.answer = std::string(tail);
  return out;
}

std::size_t count_words(std::string_view text) {
  return scan_words(utf8::decode(text)).words;
}

std::size_t approx_token_count(std::string_view text) {
  const auto scan = scan_words(utf8::decode(text));
  return scan.words + scan.punct;
}

std::size_t count_sentences(std::string_view text) {
  const auto cps = utf8::decode(text);
  std::size_t count = 0;
  bool has_content = false;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const char32_t c = cps[i];
    if (utf8::is_sentence_terminator(c)) {
      const bool decimal_point = c == U'.' && i > 0 && i + 1 < cps.size() &&
                                 utf8::is_ascii_digit(cps[i - 1]) &&
                                 utf8::is_ascii_digit(cps[i + 1]);
      if (!decimal_point) {
        if (has_content) ++count;
        has_content = false;
      }
      continue;
    }
    const auto cls = utf8::classify(c);
    if (cls == CharClass::kWord || cls == CharClass::kCjk) has_content = true;
  }
  if (has_content) ++count;
  return count;
}

std::size_t count_paragraphs(std::string_view text) {
  const auto cps = utf8::decode(text);
  std::size_t count = 0;
  bool in_block = false;
  std::size_t line_start = 0;
  for (std::size_t i = 0; i <= cps.size(); ++i) {
    if (i == cps.size() || cps[i] == U'\n') {
      const std::u32string_view line(cps.data() + line_start, i - line_start);
      if (is_blank_line(line)) {
        in_block = false;
      } else if (!in_block) {
        ++count;
        in_block = true;
      }
      line_start = i + 1;
    }
  }
  return count;
}

std::size_t count_keyword(std::string_view text, std::string_view keyword, bool case_sensitive) {
  if (keyword.empty()) throw Error(ErrorCode::kEmptyKeyword, "keyword must be non-empty");

  auto hay = utf8::decode(text);
  auto needle = utf8::decode(keyword);
  if (!case_sensitive) {
    std::transform(hay.begin(), hay.end(), hay.begin(), utf8::fold_case);
    std::transform(needle.begin(), needle.end(), needle.begin(), utf8::fold_case);
  }
  if (needle.size() > hay.size()) return 0;

  const bool substring_mode = contains_cjk(needle);
  std::size_t count = 0;
  std::size_t pos = 0;
  const std::u32string_view hv(hay);
  while (pos + needle.size() <= hay.size()) {
    const auto found = hv.find(needle, pos);
    if (found == std::u32string_view::npos) break;
    const auto end = found + needle.size();
    const bool bounded = substring_mode ||
                         ((found == 0 || is_boundary(hv, found - 1)) && is_boundary(hv, end));
    if (bounded) {
      ++count;
      pos = end;
    } else {
      pos = found + 1;
    }
  }
  return count;
}

std::size_t code_point_length(std::string_view text) { return utf8::decode(text).size(); }

}  // namespace ifrl::textstat
