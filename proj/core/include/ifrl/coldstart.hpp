#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ifrl/constraints.hpp"
#include "ifrl/model_client.hpp"
#include "ifrl/synthesis.hpp"
#include "ifrl/textstat.hpp"

// Cold-start sample filtering: correctness, thinking length and judged fluency,
// then the longest-reasoning survivors.
namespace ifrl::coldstart {

inline constexpr std::string_view kSampleSchema = "candidate_sample_v1";
inline constexpr std::string_view kAuditSchema = "coldstart_audit_v1";
inline constexpr std::string_view kJudgeTemplateVersion = "fluency_judge_v1";

inline constexpr std::int64_t kDefaultMinTokens = 1000;
inline constexpr int kDefaultMinScore = 8;
inline constexpr std::size_t kDefaultTopN = 2000;

struct Checks {
  std::optional<bool> correct;
  std::optional<bool> thinking;
  std::optional<int> fluency_score;

  friend bool operator==(const Checks&, const Checks&) = default;
};

struct CandidateSample {
  std::string sample_id;
  synthesis::PromptRecord prompt;
  std::string raw_response;
  textstat::AnswerSplit split;
  Checks checks;

  friend bool operator==(const CandidateSample&, const CandidateSample&) = default;
};

// Fills `split` from the raw response.
CandidateSample make_sample(std::string sample_id, synthesis::PromptRecord prompt,
                            std::string raw_response);

// counter(split.reasoning) >= min_tokens. Error{kInvalidArgument} if min_tokens < 1.
bool thinking_check(const textstat::AnswerSplit& split, std::int64_t min_tokens = kDefaultMinTokens,
                    const textstat::TokenCounter& counter = textstat::default_token_counter());

inline constexpr std::string_view kQuestionPlaceholder = "<question>";
inline constexpr std::string_view kAnswerPlaceholder = "<answer>";

// Built-in fluency judge template for each language.
std::string_view judge_template(constraints::Language language);

// Substitutes the placeholders in one pass; inserted text is never rescanned.
// Error{kEmptyField} on blank question/answer, Error{kInvalidArgument} when the
// template lacks either placeholder.
std::string build_judge_prompt(std::string_view question, std::string_view answer,
                               std::string_view template_text);
std::string build_judge_prompt(std::string_view question, std::string_view answer,
                               constraints::Language language = constraints::Language::kEn);

// Value of the last [[n]] in the text. Error{kNoScoreFound} / Error{kScoreOutOfRange}.
int parse_judge_score(std::string_view judge_output);

enum class Stage { kCorrectness, kThinking, kFluency, kTopN };
std::string_view to_string(Stage stage) noexcept;

struct AuditEntry {
  std::string sample_id;
  Stage stage = Stage::kCorrectness;
  bool kept = false;
  std::string reason;

  friend bool operator==(const AuditEntry&, const AuditEntry&) = default;
};

struct ColdstartConfig {
  std::int64_t min_tokens = kDefaultMinTokens;
  int min_score = kDefaultMinScore;
  std::size_t top_n = kDefaultTopN;
  // Split top_n evenly between zh and en prompts (zh gets the smaller half).
  bool balance_languages = false;
  int max_in_flight = 4;
  // Extra judge attempts when the output carries no usable score.
  int judge_retries = 1;
  int judge_max_tokens = 1024;
  double judge_temperature = 0.0;
  // Overrides the built-in per-language templates.
  std::optional<std::string> judge_template_text;
  textstat::TokenCounter counter = textstat::default_token_counter();
};

struct ColdstartResult {
  std::vector<CandidateSample> selected;  // ranked, longest reasoning first
  std::vector<CandidateSample> judged;    // every sample with its checks, input order
  std::vector<AuditEntry> audit;          // one entry per rejection, input order
  std::size_t judge_calls = 0;
};

// Stages run in order correctness -> thinking -> fluency; a sample rejected at
// one stage never reaches the next. Judge failures reject the sample with the
// reason recorded and never abort the batch. Survivors are ranked by
// counter(reasoning) descending, ties by sample_id, and cut at top_n.
// Error{kInvalidArgument} on duplicate sample ids or a bad config.
ColdstartResult coldstart_filter(std::vector<CandidateSample> samples,
                                 client::GenerationClient& judge,
                                 const ColdstartConfig& config = {});

nlohmann::json to_json(const CandidateSample& sample);
// `split` is recomputed from raw_response.
CandidateSample sample_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AuditEntry& entry);

std::vector<CandidateSample> read_samples(std::istream& in, std::string_view source);
std::vector<CandidateSample> read_samples(const std::filesystem::path& path);
void write_samples(std::ostream& out, const std::vector<CandidateSample>& samples);
void write_audit(std::ostream& out, const std::vector<AuditEntry>& audit);

}  // namespace ifrl::coldstart
