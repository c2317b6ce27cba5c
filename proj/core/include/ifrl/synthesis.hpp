#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ifrl/constraints.hpp"
#include "ifrl/error.hpp"
#include "ifrl/model_client.hpp"

// Hardness-aware prompt synthesis: constraint templates are instantiated over
// base instructions, each prompt's pass ratio is estimated by sampling a
// generation client, and prompts are bucketed into pass / easy / hard sets.
namespace ifrl::synthesis {

inline constexpr std::string_view kTemplateSchema = "template_v1";
inline constexpr std::string_view kPromptRecordSchema = "prompt_record_v1";
inline constexpr std::string_view kManifestSchema = "synth_manifest_v1";
inline constexpr std::string_view kRenderVersion = "render_v1";

inline constexpr int kDefaultTemplatesPerBase = 5;
inline constexpr int kDefaultSamplesPerPrompt = 10;
inline constexpr int kMaxResampleAttempts = 16;

inline constexpr double kDiscardBelow = 0.05;
inline constexpr double kHardUpper = 0.1;  // inclusive
inline constexpr double kEasyUpper = 0.9;  // inclusive

struct IntRange {
  std::int64_t lo = 0;
  std::int64_t hi = 0;  // inclusive

  friend bool operator==(const IntRange&, const IntRange&) = default;
};

// One constraint slot; values are drawn uniformly from the pools and ranges.
struct TemplateSlot {
  constraints::ConstraintKind kind = constraints::ConstraintKind::kKeywordRange;
  std::vector<std::string> keywords;  // keyword kinds
  std::optional<IntRange> n_min;      // ranges and *_at_most
  std::optional<IntRange> n_max;      // ranges and *_at_least
  std::optional<IntRange> n_exact;    // exact kinds
  std::vector<std::string> patterns;  // begin/end
  bool case_sensitive = true;

  friend bool operator==(const TemplateSlot&, const TemplateSlot&) = default;
};

struct InstructionTemplate {
  std::string template_id;
  constraints::Language language = constraints::Language::kEn;
  std::vector<TemplateSlot> slots;

  friend bool operator==(const InstructionTemplate&, const InstructionTemplate&) = default;
};

// Error{kSchema} unless every slot has the pools/ranges its kind needs, all
// ranges are non-empty and non-negative, and paragraph/sentence counts are >= 1.
void validate(const InstructionTemplate& tmpl);

enum class Bucket { kUnfiltered, kDiscarded, kPass, kEasy, kHard };

std::string_view to_string(Bucket bucket) noexcept;
std::optional<Bucket> bucket_from_string(std::string_view name) noexcept;

struct PromptRecord {
  std::string prompt_id;
  std::string base_instruction;
  std::string rendered_prompt;
  constraints::ConstraintSpec spec;
  std::optional<double> pass_ratio;
  Bucket bucket = Bucket::kUnfiltered;

  friend bool operator==(const PromptRecord&, const PromptRecord&) = default;
};

std::string render_clause(const constraints::ConstraintItem& item, constraints::Language language);
// Base instruction followed by a numbered list with one clause per spec item.
std::string render_prompt(std::string_view base, const constraints::ConstraintSpec& spec);

// Necessary conditions for a spec to admit some answer: keyword bounds on the
// same keyword intersect, word bounds intersect and leave room for required
// keywords, and paragraphs <= sentences.
bool is_feasible(const constraints::ConstraintSpec& spec);

// Deterministic in (base, template, seed). Draws are resampled up to
// kMaxResampleAttempts times when they violate item invariants or feasibility,
// then Error{kUnsatisfiableTemplate}. Error{kEmptyBase} on blank base.
PromptRecord instantiate_template(std::string_view base, const InstructionTemplate& tmpl,
                                  std::uint64_t seed, std::string prompt_id = {});

struct SamplingOptions {
  int k = kDefaultSamplesPerPrompt;
  int max_tokens = 2048;
  double temperature = 1.0;
};

// Fraction of k completions whose final answer satisfies every constraint.
// Client failures raise Error{kClientError} naming the prompt; no partial ratio.
double estimate_pass_ratio(const PromptRecord& prompt, client::GenerationClient& client,
                           const SamplingOptions& options = {});

// [0, 0.05) discarded, [0.05, 0.1] hard, (0.1, 0.9] easy, (0.9, 1] pass only.
// Error{kRatioOutOfRange} outside [0, 1].
Bucket bucket(double ratio);

// Any bucket other than discarded/unfiltered belongs to the pass set.
bool in_pass_set(Bucket b) noexcept;

struct SynthesisConfig {
  std::uint64_t seed = 0;
  int templates_per_base = kDefaultTemplatesPerBase;
  SamplingOptions sampling;
  int max_in_flight = 4;
};

struct PromptFailure {
  std::string prompt_id;
  ErrorCode code = ErrorCode::kClientError;
  std::string message;
};

struct SynthesisResult {
  std::vector<PromptRecord> records;  // ordered by (base index, variant)
  std::vector<PromptFailure> failures;
};

// Variant v of base b uses templates[v % templates.size()] with a seed derived
// from (config.seed, b, v). Per-prompt failures are collected, not thrown.
SynthesisResult run_synthesis(std::span<const std::string> bases,
                              std::span<const InstructionTemplate> templates,
                              client::GenerationClient& client, const SynthesisConfig& config);

nlohmann::json build_manifest(const SynthesisResult& result, std::span<const std::string> bases,
                              std::span<const InstructionTemplate> templates,
                              const client::GenerationClient& client, const SynthesisConfig& config);

// Writes pass.jsonl, easy.jsonl, hard.jsonl and manifest.json into out_dir.
void write_dataset(const std::filesystem::path& out_dir, const SynthesisResult& result,
                   const nlohmann::json& manifest);

// run_synthesis + build_manifest + write_dataset; returns the manifest.
nlohmann::json synthesize_dataset(std::span<const std::string> bases,
                                  std::span<const InstructionTemplate> templates,
                                  client::GenerationClient& client, const SynthesisConfig& config,
                                  const std::filesystem::path& out_dir);

// Optional seed expansion: asks the client for `per_seed` new instructions per
// seed (one per line) and returns the seeds followed by unique new lines.
std::vector<std::string> expand_seeds(std::span<const std::string> seeds,
                                      client::GenerationClient& client, int per_seed,
                                      std::uint64_t seed);

// ---- I/O ---------------------------------------------------------------------

nlohmann::json to_json(const InstructionTemplate& tmpl);
InstructionTemplate template_from_json(const nlohmann::json& j);
// A JSON array of templates or {"schema": "template_v1", "templates": [...]}.
std::vector<InstructionTemplate> read_templates(const std::filesystem::path& path);

// UTF-8, one base instruction per line; blank lines are skipped.
std::vector<std::string> read_seeds(const std::filesystem::path& path);

nlohmann::json to_json(const PromptRecord& record);
PromptRecord prompt_record_from_json(const nlohmann::json& j);

}  // namespace ifrl::synthesis
