#pragma once

// Independent reference implementations used as test oracles. They favour the
// most literal formulation (full sorts, two-pass means, direct formulas) over
// anything the library does, and share no code with it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "gen.hpp"
#include "ifrl/constraints.hpp"
#include "ifrl/signal_math.hpp"

namespace ifrl::testing {

// ---- text ------------------------------------------------------------------

enum class Cls { kSpace, kNewline, kCjk, kLetter, kDigit, kApostrophe, kPunct, kTerminator, kDot };

struct Frag {
  std::string text;
  Cls cls;
};

// Fragments with known classes; texts are built by concatenating them so the
// oracle never needs to decode UTF-8.
inline const std::vector<Frag>& text_alphabet() {
  static const std::vector<Frag> a = {
      {" ", Cls::kSpace},      {"\t", Cls::kSpace},         {"　", Cls::kSpace},
      {"\n", Cls::kNewline},   {"a", Cls::kLetter},         {"Z", Cls::kLetter},
      {"é", Cls::kLetter},     {"ж", Cls::kLetter},         {"한", Cls::kLetter},
      {"7", Cls::kDigit},      {"0", Cls::kDigit},          {"'", Cls::kApostrophe},
      {"’", Cls::kApostrophe}, {",", Cls::kPunct},     {"-", Cls::kPunct},
      {"，", Cls::kPunct},     {"(", Cls::kPunct},          {"!", Cls::kTerminator},
      {"?", Cls::kTerminator}, {"。", Cls::kTerminator},    {"！", Cls::kTerminator},
      {"…", Cls::kTerminator}, {".", Cls::kDot},            {"我", Cls::kCjk},
      {"爱", Cls::kCjk},       {"の", Cls::kCjk},           {"カ", Cls::kCjk},
  };
  return a;
}

inline std::vector<Frag> random_frags(Gen& g, std::size_t n) {
  std::vector<Frag> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(g.pick(text_alphabet()));
  return out;
}

inline std::string join(const std::vector<Frag>& frags) {
  std::string s;
  for (const auto& f : frags) s += f.text;
  return s;
}

inline bool run_char(Cls c) { return c == Cls::kLetter || c == Cls::kDigit || c == Cls::kApostrophe; }

struct WordOracle {
  std::size_t words = 0;
  std::size_t punct = 0;
};

inline WordOracle word_oracle(const std::vector<Frag>& f) {
  WordOracle out;
  std::size_t i = 0;
  while (i < f.size()) {
    if (run_char(f[i].cls)) {
      std::size_t j = i;
      bool has_word = false;
      std::size_t apostrophes = 0;
      while (j < f.size() && run_char(f[j].cls)) {
        has_word |= f[j].cls != Cls::kApostrophe;
        apostrophes += f[j].cls == Cls::kApostrophe;
        ++j;
      }
      if (has_word) {
        ++out.words;
      } else {
        out.punct += apostrophes;
      }
      i = j;
      continue;
    }
    if (f[i].cls == Cls::kCjk) ++out.words;
    if (f[i].cls == Cls::kPunct || f[i].cls == Cls::kTerminator || f[i].cls == Cls::kDot) ++out.punct;
    ++i;
  }
  return out;
}

inline std::size_t sentence_oracle(const std::vector<Frag>& f) {
  std::size_t count = 0;
  bool content = false;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto c = f[i].cls;
    bool terminates = c == Cls::kTerminator;
    if (c == Cls::kDot) {
      const bool decimal = i > 0 && i + 1 < f.size() && f[i - 1].cls == Cls::kDigit &&
                           f[i + 1].cls == Cls::kDigit && f[i - 1].text.size() == 1 &&
                           f[i + 1].text.size() == 1;
      terminates = !decimal;
    }
    if (terminates) {
      if (content) ++count;
      content = false;
    } else if (c == Cls::kLetter || c == Cls::kDigit || c == Cls::kCjk) {
      content = true;
    }
  }
  return count + (content ? 1 : 0);
}

inline std::size_t paragraph_oracle(const std::vector<Frag>& f) {
  std::vector<bool> line_blank{true};
  for (const auto& x : f) {
    if (x.cls == Cls::kNewline) {
      line_blank.push_back(true);
    } else if (x.cls != Cls::kSpace) {
      line_blank.back() = false;
    }
  }
  std::size_t count = 0;
  bool prev_blank = true;
  for (bool blank : line_blank) {
    if (!blank && prev_blank) ++count;
    prev_blank = blank;
  }
  return count;
}

// Non-overlapping occurrences by repeated find from the previous match end.
inline std::size_t substring_oracle(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

// ---- rewards ---------------------------------------------------------------

// Table 1 reward per item kind, written out as decimals.
inline double table1_value(const constraints::ConstraintItem& item) {
  using K = constraints::ConstraintKind;
  switch (item.kind) {
    case K::kKeywordRange: return *item.n_max < 5 ? 0.10 : 0.20;
    case K::kKeywordAtMost: return 0.05;
    case K::kKeywordAtLeast: return 0.05;
    case K::kKeywordExact: return 0.10;
    case K::kParagraphExact: return 0.10;
    case K::kSentenceExact: return 0.20;
    case K::kWordRange: return (*item.n_max - *item.n_min) > 50 ? 0.10 : 0.20;
    case K::kWordAtMost: return 0.05;
    case K::kWordAtLeast: return 0.05;
    case K::kBeginMatch: return 0.02;
    case K::kEndMatch: return 0.02;
  }
  return 0.0;
}

inline std::int64_t to_hundredths(double v) { return std::llround(v * 100.0); }

// r_c from satisfied flags, accumulated in exact hundredths.
inline double dense_oracle(const std::vector<constraints::ConstraintItem>& items,
                           const std::vector<bool>& satisfied) {
  std::int64_t got = 0;
  std::int64_t max = 100;
  bool all = true;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto v = to_hundredths(table1_value(items[i]));
    max += v;
    if (satisfied[i]) {
      got += v;
    } else {
      all = false;
    }
  }
  if (all) got += 100;
  return static_cast<double>(got) / static_cast<double>(max);
}

inline double length_reward_oracle(double rc, std::int64_t l, std::int64_t lmax, double threshold = 0.2) {
  if (l >= lmax) return -2.0;
  const double pi = std::acos(-1.0);
  const double g = 0.5 * (1.0 - std::cos(pi * static_cast<double>(l) / static_cast<double>(lmax)));
  return rc >= threshold ? 2.0 * rc * g : -g;
}

// ---- signal math -----------------------------------------------------------

inline double mean_oracle(const std::vector<double>& v) {
  long double s = 0.0L;
  for (double x : v) s += x;
  return static_cast<double>(s / static_cast<long double>(v.size()));
}

inline std::vector<double> grpo_oracle(const std::vector<double>& r) {
  const double m = mean_oracle(r);
  long double var = 0.0L;
  for (double x : r) var += (x - m) * (x - m);
  const double sd = std::sqrt(static_cast<double>(var / static_cast<long double>(r.size())));
  std::vector<double> out(r.size(), 0.0);
  if (sd < 1e-8) return out;
  for (std::size_t i = 0; i < r.size(); ++i) out[i] = (r[i] - m) / sd;
  return out;
}

inline double entropy_oracle(const std::vector<double>& p) {
  double h = 0.0;
  for (double x : p) {
    if (x > 0) h -= x * std::log(x);
  }
  return h;
}

inline double quantile_oracle(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double h = static_cast<double>(v.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

// Sort-and-cut: strict threshold, then admit exact ties in key order up to
// round(r/100 * N).
inline std::vector<signal::TokenKey> select_oracle(const std::vector<signal::TokenRecord>& batch,
                                                   double r_percent, double alpha) {
  std::vector<double> scores;
  for (const auto& t : batch) scores.push_back(t.nll - alpha * t.entropy);
  const double threshold = quantile_oracle(scores, 1.0 - r_percent / 100.0);
  const auto target = static_cast<std::size_t>(std::llround(r_percent / 100.0 * static_cast<double>(batch.size())));
  std::vector<signal::TokenKey> chosen, ties;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (scores[i] > threshold) chosen.push_back(batch[i].key());
    if (scores[i] == threshold) ties.push_back(batch[i].key());
  }
  std::sort(ties.begin(), ties.end());
  for (std::size_t i = 0; i < ties.size() && chosen.size() < target; ++i) chosen.push_back(ties[i]);
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

struct TeaOracle {
  std::vector<double> cov;
  std::vector<double> pre_cap;
  std::vector<double> w;
  double loss = 0.0;
};

inline TeaOracle tea_oracle(const std::vector<signal::TokenRecord>& r, double tau, double c) {
  TeaOracle out;
  std::vector<double> lp, adv;
  for (const auto& t : r) {
    lp.push_back(t.logp);
    adv.push_back(*t.advantage);
  }
  const double ml = mean_oracle(lp), ma = mean_oracle(adv);
  for (std::size_t i = 0; i < r.size(); ++i) out.cov.push_back((lp[i] - ml) * (adv[i] - ma));
  const double mx = *std::max_element(out.cov.begin(), out.cov.end());
  long double z = 0.0L;
  for (double x : out.cov) z += std::exp((x - mx) / tau);
  const double cap = c / static_cast<double>(r.size());
  long double acc = 0.0L;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double p = static_cast<double>(std::exp((out.cov[i] - mx) / tau) / z);
    out.pre_cap.push_back(p);
    out.w.push_back(std::min(p, cap));
    acc += out.w.back() * r[i].entropy;
  }
  out.loss = static_cast<double>(r.size()) * static_cast<double>(acc);
  return out;
}

// Random valid token records: `samples` sequences of 1..max_len tokens.
inline std::vector<signal::TokenRecord> random_records(Gen& g, std::size_t samples, std::size_t max_len,
                                                       bool with_advantage = true) {
  std::vector<signal::TokenRecord> out;
  for (std::size_t s = 0; s < samples; ++s) {
    const auto len = static_cast<std::size_t>(g.integer(1, static_cast<std::int64_t>(max_len)));
    const double adv = g.real(-2.0, 2.0);
    for (std::size_t p = 0; p < len; ++p) {
      signal::TokenRecord t;
      t.sample_id = "s" + std::to_string(s);
      t.position = static_cast<std::int64_t>(p);
      t.token_id = g.integer(0, 50000);
      t.nll = g.real(0.0, 8.0);
      t.logp = -t.nll;
      t.entropy = g.real(0.0, 5.0);
      if (with_advantage) t.advantage = adv;
      out.push_back(std::move(t));
    }
  }
  return out;
}

}  // namespace ifrl::testing
