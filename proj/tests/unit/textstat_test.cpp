#include "ifrl/textstat.hpp"

#include <gtest/gtest.h>

#include "gen.hpp"
#include "ifrl/error.hpp"
#include "oracles.hpp"

namespace ifrl::textstat {
namespace {

using testing::Gen;

TEST(ExtractAnswer, SplitsThinkBlock) {
  const auto s = extract_answer("<think>plan</think>Hello");
  EXPECT_EQ(s.reasoning, "plan");
  EXPECT_EQ(s.answer, "Hello");
  EXPECT_TRUE(s.had_think_block);
}

TEST(ExtractAnswer, NoBlockReturnsRaw) {
  const auto s = extract_answer("Hello");
  EXPECT_EQ(s.reasoning, "");
  EXPECT_EQ(s.answer, "Hello");
  EXPECT_FALSE(s.had_think_block);
}

TEST(ExtractAnswer, FirstOpenLastClose) {
  const auto s = extract_answer("<think>a</think><think>b</think>X");
  EXPECT_EQ(s.reasoning, "a");
  EXPECT_EQ(s.answer, "X");
  EXPECT_TRUE(s.had_think_block);
}

TEST(ExtractAnswer, TrimsLeadingWhitespaceOfAnswer) {
  EXPECT_EQ(extract_answer("<think>r</think>\n\n  Final").answer, "Final");
}

TEST(ExtractAnswer, DanglingOpenTagIsCut) {
  const auto s = extract_answer("<think>r</think>answer<think>unfinished");
  EXPECT_EQ(s.answer, "answer");
  EXPECT_EQ(s.answer.find("<think>"), std::string::npos);
}

TEST(ExtractAnswer, UnmatchedCloseReturnsRaw) {
  const auto s = extract_answer("oops</think>tail");
  EXPECT_FALSE(s.had_think_block);
  EXPECT_EQ(s.answer, "oops</think>tail");
}

TEST(ExtractAnswer, EmptyBlockStillCountsAsBlock) {
  const auto s = extract_answer("<think></think>Hi");
  EXPECT_TRUE(s.had_think_block);
  EXPECT_EQ(s.reasoning, "");
  EXPECT_EQ(s.answer, "Hi");
}

TEST(ExtractAnswer, IdempotentOnAnswer) {
  Gen g(11);
  const std::vector<std::string> parts = {"<think>", "</think>", "x", " ", "你", "\n", "y."};
  for (int i = 0; i < 500; ++i) {
    const auto raw = g.text(parts, static_cast<std::size_t>(g.integer(0, 12)));
    const auto split = extract_answer(raw);
    const auto& a = split.answer;
    if (split.had_think_block) {
      EXPECT_EQ(a.find("</think>"), std::string::npos) << raw;
    }
    if (a.find("<think>") == std::string::npos) {
      EXPECT_EQ(extract_answer(a).answer, a) << raw;
    }
  }
}

TEST(CountWords, Examples) {
  EXPECT_EQ(count_words(""), 0u);
  EXPECT_EQ(count_words("Hello, world"), 2u);
  EXPECT_EQ(count_words("我爱NLP模型"), 5u);
  EXPECT_EQ(count_words("don't stop"), 2u);
  EXPECT_EQ(count_words("'' ''"), 0u);
  EXPECT_EQ(count_words("3.14"), 2u);
}

TEST(CountWords, MatchesClassOracle) {
  Gen g(101);
  for (int i = 0; i < 2000; ++i) {
    const auto frags = testing::random_frags(g, static_cast<std::size_t>(g.integer(0, 40)));
    const auto text = testing::join(frags);
    const auto oracle = testing::word_oracle(frags);
    ASSERT_EQ(count_words(text), oracle.words) << text;
    ASSERT_EQ(approx_token_count(text), oracle.words + oracle.punct) << text;
  }
}

TEST(CountWords, AdditiveOverSpaceJoin) {
  Gen g(102);
  for (int i = 0; i < 500; ++i) {
    const auto a = testing::join(testing::random_frags(g, 10));
    const auto b = testing::join(testing::random_frags(g, 10));
    EXPECT_EQ(count_words(a + " " + b), count_words(a) + count_words(b)) << a << "|" << b;
  }
}

TEST(CountSentences, Examples) {
  EXPECT_EQ(count_sentences(""), 0u);
  EXPECT_EQ(count_sentences("A. B! C?"), 3u);
  EXPECT_EQ(count_sentences("Pi is 3.14. Done"), 2u);
  EXPECT_EQ(count_sentences("Wait?! Really..."), 2u);
  EXPECT_EQ(count_sentences("你好。再见！"), 2u);
  EXPECT_EQ(count_sentences("..."), 0u);
}

TEST(CountSentences, MatchesScanOracle) {
  Gen g(103);
  for (int i = 0; i < 2000; ++i) {
    const auto frags = testing::random_frags(g, static_cast<std::size_t>(g.integer(0, 40)));
    const auto text = testing::join(frags);
    ASSERT_EQ(count_sentences(text), testing::sentence_oracle(frags)) << text;
  }
}

TEST(CountParagraphs, Examples) {
  EXPECT_EQ(count_paragraphs(""), 0u);
  EXPECT_EQ(count_paragraphs("a\n\nb\n\n\nc"), 3u);
  EXPECT_EQ(count_paragraphs("a\nb"), 1u);
  EXPECT_EQ(count_paragraphs("a\n \t\nb"), 2u);
  EXPECT_EQ(count_paragraphs("a\r\n\r\nb"), 2u);
}

TEST(CountParagraphs, MatchesLineOracleAndNonEmptyHasOne) {
  Gen g(104);
  for (int i = 0; i < 2000; ++i) {
    const auto frags = testing::random_frags(g, static_cast<std::size_t>(g.integer(0, 40)));
    const auto text = testing::join(frags);
    const auto n = count_paragraphs(text);
    ASSERT_EQ(n, testing::paragraph_oracle(frags)) << text;
    const bool visible = std::any_of(frags.begin(), frags.end(), [](const auto& f) {
      return f.cls != testing::Cls::kSpace && f.cls != testing::Cls::kNewline;
    });
    if (visible) {
      ASSERT_GE(n, 1u);
    }
  }
}

TEST(CountKeyword, Examples) {
  EXPECT_EQ(count_keyword("the theme", "the"), 1u);
  EXPECT_EQ(count_keyword("aaa", "aa"), 0u);
  EXPECT_EQ(count_keyword("哈哈哈", "哈哈"), 1u);  // non-overlapping
  EXPECT_EQ(count_keyword("春天来了，春天", "春天"), 2u);
  EXPECT_EQ(count_keyword("The the THE", "the", false), 3u);
  EXPECT_EQ(count_keyword("The the THE", "the", true), 1u);
  EXPECT_EQ(count_keyword("ice-cream, ice cream", "ice cream"), 1u);
  EXPECT_EQ(count_keyword("spring's spring", "spring"), 2u);  // apostrophe is a boundary
}

TEST(CountKeyword, EmptyKeywordThrows) {
  try {
    count_keyword("abc", "");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyKeyword);
  }
}

TEST(CountKeyword, CjkMatchesSubstringOracle) {
  Gen g(105);
  const std::vector<std::string> alpha = {"春", "天", "来", "了", "，", " ", "a"};
  const std::vector<std::string> needles = {"春天", "天天", "春", "天来了"};
  for (int i = 0; i < 2000; ++i) {
    const auto text = g.text(alpha, static_cast<std::size_t>(g.integer(0, 30)));
    const auto& k = g.pick(needles);
    ASSERT_EQ(count_keyword(text, k), testing::substring_oracle(text, k)) << text << " / " << k;
  }
}

TEST(CountKeyword, BoundedByLengthRatio) {
  Gen g(106);
  const std::vector<std::string> alpha = {"a", "b", " ", "ab", "春"};
  const std::vector<std::string> needles = {"a", "ab", "a b", "春", "b"};
  for (int i = 0; i < 2000; ++i) {
    const auto text = g.text(alpha, static_cast<std::size_t>(g.integer(0, 30)));
    const auto& k = g.pick(needles);
    ASSERT_LE(count_keyword(text, k, g.coin()), code_point_length(text) / code_point_length(k));
  }
}

TEST(ApproxTokenCount, Examples) {
  EXPECT_EQ(approx_token_count(""), 0u);
  EXPECT_EQ(approx_token_count("Hello, world."), 4u);
  EXPECT_EQ(approx_token_count("你好。"), 3u);
}

TEST(Trim, UnicodeWhitespace) {
  EXPECT_EQ(trim_left("　 \tx "), "x ");
  EXPECT_EQ(trim_right(" x\n "), " x");
  EXPECT_EQ(trim_left("   "), "");
}

TEST(Textstat, MalformedUtf8IsTotal) {
  const std::string bad = "ab\xff\xfe cd";
  EXPECT_EQ(count_words(bad), 2u);
  EXPECT_NO_THROW(count_sentences(bad));
  EXPECT_NO_THROW(approx_token_count(bad));
}

}  // namespace
}  // namespace ifrl::textstat
