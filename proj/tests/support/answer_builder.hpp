#pragma once

// Builds an answer that satisfies a feasible spec: each keyword at its lower
// bound, filler words up to the word minimum, the requested number of
// sentences split into the requested number of paragraphs, and begin/end
// patterns in place. Assumes keyword pools without substring relations and
// patterns without sentence terminators (true for the test templates).

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ifrl/constraints.hpp"
#include "ifrl/textstat.hpp"

namespace ifrl::testing {

inline std::optional<std::string> build_satisfying_answer(const constraints::ConstraintSpec& spec) {
  using K = constraints::ConstraintKind;
  constexpr auto kInf = std::numeric_limits<std::int64_t>::max();
  std::map<std::string, std::pair<std::int64_t, std::int64_t>> kw;
  std::int64_t wlo = 0, whi = kInf;
  std::optional<std::int64_t> sentences, paragraphs;
  std::string begin, end;
  for (const auto& it : spec.items) {
    auto& b = it.keyword ? kw.try_emplace(*it.keyword, 0, kInf).first->second : kw[""];
    switch (it.kind) {
      case K::kKeywordRange: b = {std::max(b.first, *it.n_min), std::min(b.second, *it.n_max)}; break;
      case K::kKeywordAtMost: b.second = std::min(b.second, *it.n_min); break;
      case K::kKeywordAtLeast: b.first = std::max(b.first, *it.n_max); break;
      case K::kKeywordExact: b = {std::max(b.first, *it.n_exact), std::min(b.second, *it.n_exact)}; break;
      case K::kParagraphExact: paragraphs = *it.n_exact; break;
      case K::kSentenceExact: sentences = *it.n_exact; break;
      case K::kWordRange: wlo = std::max(wlo, *it.n_min); whi = std::min(whi, *it.n_max); break;
      case K::kWordAtMost: whi = std::min(whi, *it.n_min); break;
      case K::kWordAtLeast: wlo = std::max(wlo, *it.n_max); break;
      case K::kBeginMatch: begin = *it.pattern; break;
      case K::kEndMatch: end = *it.pattern; break;
    }
  }
  kw.erase("");

  std::vector<std::string> tokens;
  std::int64_t words = static_cast<std::int64_t>(textstat::count_words(begin) + textstat::count_words(end));
  for (const auto& [k, bounds] : kw) {
    if (bounds.first > bounds.second) return std::nullopt;
    for (std::int64_t i = 0; i < bounds.first; ++i) {
      tokens.push_back(k);
      words += static_cast<std::int64_t>(textstat::count_words(k));
    }
  }
  const std::int64_t p = paragraphs.value_or(1);
  const std::int64_t s = sentences.value_or(std::max<std::int64_t>(p, 1));
  if (p > s) return std::nullopt;
  // Every sentence needs content: patterns cover the first/last sentence.
  std::int64_t slots = static_cast<std::int64_t>(tokens.size()) + (begin.empty() ? 0 : 1) + (end.empty() ? 0 : 1);
  while (words < wlo || slots < s) {
    tokens.push_back("filler");
    ++words;
    ++slots;
  }
  if (words > whi) return std::nullopt;

  // Distribute tokens over s sentences; the first and last carry the patterns.
  std::vector<std::vector<std::string>> sent(static_cast<std::size_t>(s));
  std::size_t next = 0;
  for (std::int64_t i = 0; i < s; ++i) {
    auto& cur = sent[static_cast<std::size_t>(i)];
    if (i == 0 && !begin.empty()) cur.push_back(begin);
    const bool pattern_covers = (i == 0 && !begin.empty()) || (i == s - 1 && !end.empty());
    if (!pattern_covers && next < tokens.size()) cur.push_back(tokens[next++]);
  }
  for (; next < tokens.size(); ++next) sent.back().push_back(tokens[next]);
  if (!end.empty()) sent.back().push_back(end);

  std::string out;
  const std::int64_t per_para = s / p;
  for (std::int64_t i = 0; i < s; ++i) {
    std::string line;
    for (const auto& t : sent[static_cast<std::size_t>(i)]) line += (line.empty() ? "" : " ") + t;
    out += line;
    const bool last = i == s - 1;
    if (!(last && !end.empty())) out += ".";
    if (last) break;
    const bool para_break = (i + 1) % per_para == 0 && (i + 1) / per_para < p;
    out += para_break ? "\n\n" : " ";
  }
  return out;
}

}  // namespace ifrl::testing
