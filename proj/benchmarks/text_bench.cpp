#include <benchmark/benchmark.h>

#include <string>

#include "ifrl/constraints.hpp"
#include "ifrl/textstat.hpp"

namespace {

using namespace ifrl;

std::string sample_text(std::size_t paragraphs) {
  std::string out;
  for (std::size_t i = 0; i < paragraphs; ++i) {
    out += "The river runs past the old stone mill. Apples fall in spring, and the wind is cold. ";
    out += "春天来了，河水很清。我们在月亮下散步。\n\n";
  }
  return out;
}

void BM_CountWords(benchmark::State& state) {
  const auto text = sample_text(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(textstat::count_words(text));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_CountWords)->Range(1, 256);

void BM_CountKeyword(benchmark::State& state) {
  const auto text = sample_text(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(textstat::count_keyword(text, "river", false));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_CountKeyword)->Range(1, 256);

void BM_Verify(benchmark::State& state) {
  const auto text = sample_text(static_cast<std::size_t>(state.range(0)));
  constraints::ConstraintSpec spec;
  spec.spec_id = "bench";
  spec.items = {constraints::ConstraintItem::keyword_range("river", 1, 3),
                constraints::ConstraintItem::keyword_at_most("春天", 2),
                constraints::ConstraintItem::word_range(50, 400),
                constraints::ConstraintItem::sentence_exact(8),
                constraints::ConstraintItem::paragraph_exact(2),
                constraints::ConstraintItem::begin_match("The")};
  for (auto _ : state) {
    const auto report = constraints::verify(text, spec);
    benchmark::DoNotOptimize(constraints::dense_reward(report));
  }
}
BENCHMARK(BM_Verify)->Range(1, 64);

}  // namespace
