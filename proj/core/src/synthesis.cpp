#include "ifrl/synthesis.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "ifrl/digest.hpp"
#include "ifrl/error.hpp"
#include "ifrl/jsonl.hpp"
#include "ifrl/textstat.hpp"
#include "parallel.hpp"

namespace ifrl::synthesis {
namespace {

using constraints::ConstraintItem;
using constraints::ConstraintKind;
using constraints::ConstraintSpec;
using constraints::Language;
using nlohmann::json;

constexpr std::int64_t kUnbounded = std::numeric_limits<std::int64_t>::max();

[[noreturn]] void schema_error(const InstructionTemplate& t, const std::string& what) {
  throw Error(ErrorCode::kSchema, "template '" + t.template_id + "': " + what);
}

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t base_index, std::uint64_t variant) {
  return mix64(mix64(seed) ^ mix64(base_index * 0x100000001b3ULL + variant + 1));
}

// std::uniform_int_distribution is implementation-defined; this keeps datasets
// reproducible across standard libraries.
std::int64_t uniform_in(std::mt19937_64& rng, IntRange range) {
  const auto span = static_cast<std::uint64_t>(range.hi - range.lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(rng());
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return range.lo + static_cast<std::int64_t>(x % span);
}

const std::string& pick(std::mt19937_64& rng, const std::vector<std::string>& pool) {
  return pool[static_cast<std::size_t>(uniform_in(rng, {0, static_cast<std::int64_t>(pool.size()) - 1}))];
}

ConstraintItem sample_slot(const TemplateSlot& slot, std::mt19937_64& rng) {
  ConstraintItem item;
  item.kind = slot.kind;
  item.case_sensitive = slot.case_sensitive;
  if (constraints::is_keyword_kind(slot.kind)) item.keyword = pick(rng, slot.keywords);
  if (slot.n_min) item.n_min = uniform_in(rng, *slot.n_min);
  if (slot.n_max) item.n_max = uniform_in(rng, *slot.n_max);
  if (slot.n_exact) item.n_exact = uniform_in(rng, *slot.n_exact);
  if (!slot.patterns.empty()) item.pattern = pick(rng, slot.patterns);
  return item;
}

bool item_valid(const ConstraintItem& item) {
  try {
    constraints::validate(item);
    return true;
  } catch (const Error&) {
    return false;
  }
}

std::string quote(std::string_view s, Language language) {
  return language == Language::kZh ? "“" + std::string(s) + "”" : "\"" + std::string(s) + "\"";
}

std::string make_prompt_id(std::size_t base_index, int variant, const std::string& template_id) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "b%05zu-v%d-", base_index, variant);
  return buf + template_id;
}

json range_to_json(const IntRange& r) { return json::array({r.lo, r.hi}); }

std::optional<IntRange> range_from_json(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (it->is_number_integer()) return IntRange{it->get<std::int64_t>(), it->get<std::int64_t>()};
  if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number_integer() ||
      !(*it)[1].is_number_integer()) {
    throw Error(ErrorCode::kSchema, std::string("'") + key + "' must be [lo, hi] integers");
  }
  return IntRange{(*it)[0].get<std::int64_t>(), (*it)[1].get<std::int64_t>()};
}

std::vector<std::string> strings_from_json(const json& j, const char* key) {
  std::vector<std::string> out;
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return out;
  if (!it->is_array()) throw Error(ErrorCode::kSchema, std::string("'") + key + "' must be an array");
  for (const auto& v : *it) {
    if (!v.is_string()) throw Error(ErrorCode::kSchema, std::string("'") + key + "' entries must be strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::string strip_list_marker(std::string_view line) {
  line = textstat::trim_right(textstat::trim_left(line));
  std::size_t i = 0;
  while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
  if (i > 0 && i < line.size() && (line[i] == '.' || line[i] == ')')) {
    line.remove_prefix(i + 1);
  } else if (!line.empty() && (line[0] == '-' || line[0] == '*')) {
    line.remove_prefix(1);
  }
  return std::string(textstat::trim_left(line));
}

}  // namespace

void validate(const InstructionTemplate& t) {
  if (t.template_id.empty()) throw Error(ErrorCode::kSchema, "template_id must be non-empty");
  if (t.slots.empty()) schema_error(t, "no slots");
  int begins = 0;
  int ends = 0;
  for (const auto& slot : t.slots) {
    const auto name = std::string(constraints::to_string(slot.kind));
    auto need_range = [&](const std::optional<IntRange>& r, const char* field, std::int64_t min_lo) {
      if (!r) schema_error(t, name + " slot needs '" + field + "'");
      if (r->lo > r->hi) schema_error(t, name + " slot has empty '" + field + "' range");
      if (r->lo < min_lo) {
        schema_error(t, name + " slot '" + field + "' must be >= " + std::to_string(min_lo));
      }
    };
    if (constraints::is_keyword_kind(slot.kind)) {
      if (slot.keywords.empty()) schema_error(t, name + " slot needs a keyword pool");
      for (const auto& k : slot.keywords) {
        if (k.empty()) schema_error(t, name + " slot has an empty keyword");
      }
    }
    switch (slot.kind) {
      case ConstraintKind::kKeywordRange:
      case ConstraintKind::kWordRange:
        need_range(slot.n_min, "n_min", 0);
        need_range(slot.n_max, "n_max", 0);
        break;
      case ConstraintKind::kKeywordAtMost:
      case ConstraintKind::kWordAtMost:
        need_range(slot.n_min, "n_min", 0);
        break;
      case ConstraintKind::kKeywordAtLeast:
      case ConstraintKind::kWordAtLeast:
        need_range(slot.n_max, "n_max", 0);
        break;
      case ConstraintKind::kKeywordExact:
        need_range(slot.n_exact, "n_exact", 0);
        break;
      case ConstraintKind::kParagraphExact:
      case ConstraintKind::kSentenceExact:
        need_range(slot.n_exact, "n_exact", 1);
        break;
      case ConstraintKind::kBeginMatch:
      case ConstraintKind::kEndMatch:
        if (slot.patterns.empty()) schema_error(t, name + " slot needs a pattern pool");
        for (const auto& p : slot.patterns) {
          if (textstat::trim_left(p).empty()) schema_error(t, name + " slot has a blank pattern");
        }
        begins += slot.kind == ConstraintKind::kBeginMatch;
        ends += slot.kind == ConstraintKind::kEndMatch;
        break;
    }
  }
  if (begins > 1 || ends > 1) schema_error(t, "at most one begin_match and one end_match slot");
}

std::string_view to_string(Bucket bucket) noexcept {
  switch (bucket) {
    case Bucket::kUnfiltered: return "unfiltered";
    case Bucket::kDiscarded: return "discarded";
    case Bucket::kPass: return "pass";
    case Bucket::kEasy: return "easy";
    case Bucket::kHard: return "hard";
  }
  return "unfiltered";
}

std::optional<Bucket> bucket_from_string(std::string_view name) noexcept {
  for (auto b : {Bucket::kUnfiltered, Bucket::kDiscarded, Bucket::kPass, Bucket::kEasy, Bucket::kHard}) {
    if (to_string(b) == name) return b;
  }
  return std::nullopt;
}

std::string render_clause(const ConstraintItem& item, Language language) {
  const bool zh = language == Language::kZh;
  const auto n = [](const std::optional<std::int64_t>& v) { return std::to_string(v.value_or(0)); };
  const std::string kw = item.keyword ? quote(*item.keyword, language) : std::string();
  const std::string pat = item.pattern ? quote(*item.pattern, language) : std::string();
  switch (item.kind) {
    case ConstraintKind::kKeywordRange:
      return zh ? "关键词" + kw + "应出现" + n(item.n_min) + "到" + n(item.n_max) + "次。"
                : "The keyword " + kw + " should appear between " + n(item.n_min) + " and " +
                      n(item.n_max) + " times.";
    case ConstraintKind::kKeywordAtMost:
      return zh ? "关键词" + kw + "最多出现" + n(item.n_min) + "次。"
                : "The keyword " + kw + " should appear at most " + n(item.n_min) + " times.";
    case ConstraintKind::kKeywordAtLeast:
      return zh ? "关键词" + kw + "至少出现" + n(item.n_max) + "次。"
                : "The keyword " + kw + " should appear at least " + n(item.n_max) + " times.";
    case ConstraintKind::kKeywordExact:
      return zh ? "关键词" + kw + "必须恰好出现" + n(item.n_exact) + "次。"
                : "The keyword " + kw + " should appear exactly " + n(item.n_exact) + " times.";
    case ConstraintKind::kParagraphExact:
      return zh ? "回答必须恰好包含" + n(item.n_exact) + "个段落，段落之间用空行分隔。"
                : "Your response must contain exactly " + n(item.n_exact) +
                      " paragraphs, separated by blank lines.";
    case ConstraintKind::kSentenceExact:
      return zh ? "回答必须恰好包含" + n(item.n_exact) + "个句子。"
                : "Your response must contain exactly " + n(item.n_exact) + " sentences.";
    case ConstraintKind::kWordRange:
      return zh ? "回答的字数应在" + n(item.n_min) + "到" + n(item.n_max) + "之间。"
                : "Your response should contain between " + n(item.n_min) + " and " +
                      n(item.n_max) + " words.";
    case ConstraintKind::kWordAtMost:
      return zh ? "回答的字数不超过" + n(item.n_min) + "。"
                : "Your response should contain at most " + n(item.n_min) + " words.";
    case ConstraintKind::kWordAtLeast:
      return zh ? "回答的字数不少于" + n(item.n_max) + "。"
                : "Your response should contain at least " + n(item.n_max) + " words.";
    case ConstraintKind::kBeginMatch:
      return zh ? "回答必须以" + pat + "开头。" : "Begin your response with " + pat + ".";
    case ConstraintKind::kEndMatch:
      return zh ? "回答必须以" + pat + "结尾。" : "End your response with " + pat + ".";
  }
  return {};
}

std::string render_prompt(std::string_view base, const ConstraintSpec& spec) {
  const bool zh = spec.language == Language::kZh;
  std::string out(textstat::trim_right(base));
  out += zh ? "\n\n请严格遵守以下要求：\n" : "\n\nFollow these requirements strictly:\n";
  for (std::size_t i = 0; i < spec.items.size(); ++i) {
    out += std::to_string(i + 1) + ". " + render_clause(spec.items[i], spec.language);
    if (i + 1 < spec.items.size()) out += '\n';
  }
  return out;
}

bool is_feasible(const ConstraintSpec& spec) {
  struct Interval {
    std::int64_t lo = 0;
    std::int64_t hi = kUnbounded;
    void clamp(std::int64_t l, std::int64_t h) {
      lo = std::max(lo, l);
      hi = std::min(hi, h);
    }
    bool empty() const { return lo > hi; }
  };

  std::map<std::pair<std::string, bool>, Interval> keywords;
  Interval words;
  std::optional<std::int64_t> paragraphs;
  std::optional<std::int64_t> sentences;
  std::int64_t fixed_words = 0;

  for (const auto& item : spec.items) {
    switch (item.kind) {
      case ConstraintKind::kKeywordRange:
        keywords[{*item.keyword, item.case_sensitive}].clamp(*item.n_min, *item.n_max);
        break;
      case ConstraintKind::kKeywordAtMost:
        keywords[{*item.keyword, item.case_sensitive}].clamp(0, *item.n_min);
        break;
      case ConstraintKind::kKeywordAtLeast:
        keywords[{*item.keyword, item.case_sensitive}].clamp(*item.n_max, kUnbounded);
        break;
      case ConstraintKind::kKeywordExact:
        keywords[{*item.keyword, item.case_sensitive}].clamp(*item.n_exact, *item.n_exact);
        break;
      case ConstraintKind::kParagraphExact:
        if (paragraphs && *paragraphs != *item.n_exact) return false;
        paragraphs = *item.n_exact;
        break;
      case ConstraintKind::kSentenceExact:
        if (sentences && *sentences != *item.n_exact) return false;
        sentences = *item.n_exact;
        break;
      case ConstraintKind::kWordRange:
        words.clamp(*item.n_min, *item.n_max);
        break;
      case ConstraintKind::kWordAtMost:
        words.clamp(0, *item.n_min);
        break;
      case ConstraintKind::kWordAtLeast:
        words.clamp(*item.n_max, kUnbounded);
        break;
      case ConstraintKind::kBeginMatch:
      case ConstraintKind::kEndMatch:
        fixed_words += static_cast<std::int64_t>(textstat::count_words(*item.pattern));
        break;
    }
  }
  if (words.empty()) return false;

  std::int64_t required_words = fixed_words;
  for (const auto& [key, interval] : keywords) {
    if (interval.empty()) return false;
    const auto per = static_cast<std::int64_t>(textstat::count_words(key.first));
    required_words += interval.lo * std::max<std::int64_t>(per, 1);
  }
  if (paragraphs && sentences && *paragraphs > *sentences) return false;
  const std::int64_t min_sentences = sentences.value_or(paragraphs.value_or(0));
  return std::max(required_words, min_sentences) <= words.hi;
}

PromptRecord instantiate_template(std::string_view base, const InstructionTemplate& tmpl,
                                  std::uint64_t seed, std::string prompt_id) {
  if (textstat::trim_left(base).empty()) {
    throw Error(ErrorCode::kEmptyBase, "base instruction is empty");
  }
  validate(tmpl);

  std::mt19937_64 rng(seed);
  ConstraintSpec spec;
  spec.language = tmpl.language;
  spec.spec_id = prompt_id.empty() ? tmpl.template_id + "-" + std::to_string(seed) : prompt_id;

  bool ok = false;
  for (int attempt = 0; attempt < kMaxResampleAttempts && !ok; ++attempt) {
    spec.items.clear();
    ok = true;
    for (const auto& slot : tmpl.slots) {
      spec.items.push_back(sample_slot(slot, rng));
      if (!item_valid(spec.items.back())) ok = false;
    }
    ok = ok && is_feasible(spec);
  }
  if (!ok) {
    throw Error(ErrorCode::kUnsatisfiableTemplate,
                "template '" + tmpl.template_id + "' produced no satisfiable draw in " +
                    std::to_string(kMaxResampleAttempts) + " attempts");
  }

  PromptRecord record;
  record.prompt_id = spec.spec_id;
  record.base_instruction = std::string(base);
  record.rendered_prompt = render_prompt(base, spec);
  record.spec = std::move(spec);
  return record;
}

double estimate_pass_ratio(const PromptRecord& prompt, client::GenerationClient& client,
                           const SamplingOptions& options) {
  if (options.k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  client::GenerationRequest request;
  request.prompt = prompt.rendered_prompt;
  request.n = options.k;
  request.max_tokens = options.max_tokens;
  request.temperature = options.temperature;

  client::GenerationResponse response;
  try {
    response = client.generate(request);
  } catch (const Error& e) {
    if (!is_client_error(e.code())) throw;
    throw Error(ErrorCode::kClientError, "prompt " + prompt.prompt_id + ": " + e.what());
  }
  if (response.completions.size() != static_cast<std::size_t>(options.k)) {
    throw Error(ErrorCode::kClientError, "prompt " + prompt.prompt_id + ": expected " +
                                             std::to_string(options.k) + " completions");
  }
  int passed = 0;
  for (const auto& completion : response.completions) {
    const auto split = textstat::extract_answer(completion);
    passed += constraints::verify(split.answer, prompt.spec).all_satisfied ? 1 : 0;
  }
  return static_cast<double>(passed) / static_cast<double>(options.k);
}

Bucket bucket(double ratio) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) {
    throw Error(ErrorCode::kRatioOutOfRange, "pass ratio must lie in [0, 1], got " + std::to_string(ratio));
  }
  if (ratio < kDiscardBelow) return Bucket::kDiscarded;
  if (ratio <= kHardUpper) return Bucket::kHard;
  if (ratio <= kEasyUpper) return Bucket::kEasy;
  return Bucket::kPass;
}

bool in_pass_set(Bucket b) noexcept {
  return b == Bucket::kPass || b == Bucket::kEasy || b == Bucket::kHard;
}

SynthesisResult run_synthesis(std::span<const std::string> bases,
                              std::span<const InstructionTemplate> templates,
                              client::GenerationClient& client, const SynthesisConfig& config) {
  if (bases.empty()) throw Error(ErrorCode::kInvalidArgument, "no base instructions");
  if (templates.empty()) throw Error(ErrorCode::kInvalidArgument, "no templates");
  if (config.templates_per_base < 1) {
    throw Error(ErrorCode::kInvalidArgument, "templates_per_base must be >= 1");
  }
  for (const auto& t : templates) validate(t);

  struct Slot {
    std::optional<PromptRecord> record;
    std::string prompt_id;
    ErrorCode code = ErrorCode::kClientError;
    std::string error;
  };
  std::vector<Slot> slots;
  slots.reserve(bases.size() * static_cast<std::size_t>(config.templates_per_base));
  for (std::size_t b = 0; b < bases.size(); ++b) {
    for (int v = 0; v < config.templates_per_base; ++v) {
      const auto& tmpl = templates[static_cast<std::size_t>(v) % templates.size()];
      Slot slot;
      slot.prompt_id = make_prompt_id(b, v, tmpl.template_id);
      try {
        slot.record = instantiate_template(bases[b], tmpl,
                                           derive_seed(config.seed, b, static_cast<std::uint64_t>(v)),
                                           slot.prompt_id);
      } catch (const Error& e) {
        slot.code = e.code();
        slot.error = e.what();
      }
      slots.push_back(std::move(slot));
    }
  }

  detail::parallel_for(slots.size(), config.max_in_flight, [&](std::size_t i) {
    auto& slot = slots[i];
    if (!slot.record) return;
    try {
      const double ratio = estimate_pass_ratio(*slot.record, client, config.sampling);
      slot.record->pass_ratio = ratio;
      slot.record->bucket = bucket(ratio);
    } catch (const Error& e) {
      slot.code = e.code();
      slot.error = e.what();
    } catch (const std::exception& e) {
      slot.code = ErrorCode::kClientError;
      slot.error = e.what();
    }
  });

  SynthesisResult result;
  for (auto& slot : slots) {
    if (slot.error.empty()) {
      result.records.push_back(std::move(*slot.record));
    } else {
      result.failures.push_back({slot.prompt_id, slot.code, slot.error});
    }
  }
  return result;
}

json build_manifest(const SynthesisResult& result, std::span<const std::string> bases,
                    std::span<const InstructionTemplate> templates,
                    const client::GenerationClient& client, const SynthesisConfig& config) {
  std::size_t discarded = 0, hard = 0, easy = 0, pass_only = 0;
  for (const auto& r : result.records) {
    switch (r.bucket) {
      case Bucket::kDiscarded: ++discarded; break;
      case Bucket::kHard: ++hard; break;
      case Bucket::kEasy: ++easy; break;
      case Bucket::kPass: ++pass_only; break;
      case Bucket::kUnfiltered: break;
    }
  }
  json template_ids = json::array();
  json template_json = json::array();
  for (const auto& t : templates) {
    template_ids.push_back(t.template_id);
    template_json.push_back(to_json(t));
  }
  json failures = json::array();
  for (const auto& f : result.failures) {
    failures.push_back(
        json{{"prompt_id", f.prompt_id}, {"code", to_string(f.code)}, {"error", f.message}});
  }
  return json{
      {"schema", kManifestSchema},
      {"render_version", kRenderVersion},
      {"seed", config.seed},
      {"k", config.sampling.k},
      {"max_tokens", config.sampling.max_tokens},
      {"temperature", config.sampling.temperature},
      {"templates_per_base", config.templates_per_base},
      {"template_ids", std::move(template_ids)},
      {"templates_digest", config_digest(template_json)},
      {"num_seeds", bases.size()},
      {"seeds_digest", config_digest(json(std::vector<std::string>(bases.begin(), bases.end())))},
      {"client_config_digest", config_digest(client.describe())},
      {"counts",
       {{"prompts", result.records.size() + result.failures.size()},
        {"failed", result.failures.size()},
        {"discarded", discarded},
        {"hard", hard},
        {"easy", easy},
        {"pass_only", pass_only},
        {"pass", hard + easy + pass_only}}},
      {"failures", std::move(failures)},
  };
}

void write_dataset(const std::filesystem::path& out_dir, const SynthesisResult& result,
                   const json& manifest) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + out_dir.string() + ": " + ec.message());

  std::ostringstream pass, easy, hard;
  for (auto* s : {&pass, &easy, &hard}) jsonl::write_line(*s, jsonl::make_header(kPromptRecordSchema));
  for (const auto& r : result.records) {
    if (!in_pass_set(r.bucket)) continue;
    const auto j = to_json(r);
    jsonl::write_line(pass, j);
    if (r.bucket == Bucket::kEasy) jsonl::write_line(easy, j);
    if (r.bucket == Bucket::kHard) jsonl::write_line(hard, j);
  }
  jsonl::write_file_atomic(out_dir / "pass.jsonl", pass.str());
  jsonl::write_file_atomic(out_dir / "easy.jsonl", easy.str());
  jsonl::write_file_atomic(out_dir / "hard.jsonl", hard.str());
  jsonl::write_file_atomic(out_dir / "manifest.json", manifest.dump(2) + "\n");
}

json synthesize_dataset(std::span<const std::string> bases,
                        std::span<const InstructionTemplate> templates,
                        client::GenerationClient& client, const SynthesisConfig& config,
                        const std::filesystem::path& out_dir) {
  const auto result = run_synthesis(bases, templates, client, config);
  auto manifest = build_manifest(result, bases, templates, client, config);
  write_dataset(out_dir, result, manifest);
  return manifest;
}

std::vector<std::string> expand_seeds(std::span<const std::string> seeds,
                                      client::GenerationClient& client, int per_seed,
                                      std::uint64_t seed) {
  if (per_seed < 0) throw Error(ErrorCode::kInvalidArgument, "per_seed must be >= 0");
  std::vector<std::string> out(seeds.begin(), seeds.end());
  std::unordered_set<std::string> seen(seeds.begin(), seeds.end());
  if (per_seed == 0) return out;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    client::GenerationRequest request;
    request.prompt = "Here is an instruction a user gave to an AI assistant:\n" + seeds[i] +
                     "\n\nWrite " + std::to_string(per_seed) +
                     " new instructions of a similar kind on different topics. "
                     "Output one instruction per line, without numbering or commentary.";
    request.n = 1;
    request.seed = static_cast<std::int64_t>(derive_seed(seed, i, 0) >> 1);
    const auto response = client.generate(request);
    std::istringstream lines(response.completions.front());
    std::string line;
    int added = 0;
    while (added < per_seed && std::getline(lines, line)) {
      auto cleaned = strip_list_marker(line);
      if (cleaned.empty() || !seen.insert(cleaned).second) continue;
      out.push_back(std::move(cleaned));
      ++added;
    }
  }
  return out;
}

json to_json(const InstructionTemplate& t) {
  json slots = json::array();
  for (const auto& s : t.slots) {
    json j{{"kind", constraints::to_string(s.kind)}};
    if (!s.keywords.empty()) j["keywords"] = s.keywords;
    if (s.n_min) j["n_min"] = range_to_json(*s.n_min);
    if (s.n_max) j["n_max"] = range_to_json(*s.n_max);
    if (s.n_exact) j["n_exact"] = range_to_json(*s.n_exact);
    if (!s.patterns.empty()) j["patterns"] = s.patterns;
    if (!s.case_sensitive) j["case_sensitive"] = false;
    slots.push_back(std::move(j));
  }
  return json{{"template_id", t.template_id},
              {"language", constraints::to_string(t.language)},
              {"slots", std::move(slots)}};
}

InstructionTemplate template_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kSchema, "template must be an object");
  InstructionTemplate t;
  try {
    t.template_id = j.at("template_id").get<std::string>();
    const auto lang = j.value("language", std::string("en"));
    const auto language = constraints::language_from_string(lang);
    if (!language) throw Error(ErrorCode::kSchema, "unknown language '" + lang + "'");
    t.language = *language;
    for (const auto& s : j.at("slots")) {
      TemplateSlot slot;
      const auto kind_name = s.at("kind").get<std::string>();
      const auto kind = constraints::kind_from_string(kind_name);
      if (!kind) throw Error(ErrorCode::kSchema, "unknown constraint kind '" + kind_name + "'");
      slot.kind = *kind;
      slot.keywords = strings_from_json(s, "keywords");
      slot.n_min = range_from_json(s, "n_min");
      slot.n_max = range_from_json(s, "n_max");
      slot.n_exact = range_from_json(s, "n_exact");
      slot.patterns = strings_from_json(s, "patterns");
      slot.case_sensitive = s.value("case_sensitive", true);
      t.slots.push_back(std::move(slot));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchema, std::string("bad template: ") + e.what());
  }
  validate(t);
  return t;
}

std::vector<InstructionTemplate> read_templates(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(jsonl::read_text_file(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kSchema, path.string() + ": " + e.what());
  }
  const json* list = &j;
  if (j.is_object()) {
    if (const auto schema = j.value("schema", std::string(kTemplateSchema)); schema != kTemplateSchema) {
      throw Error(ErrorCode::kSchema, path.string() + ": unsupported schema '" + schema + "'");
    }
    if (!j.contains("templates")) throw Error(ErrorCode::kSchema, path.string() + ": no 'templates'");
    list = &j["templates"];
  }
  if (!list->is_array()) throw Error(ErrorCode::kSchema, path.string() + ": templates must be an array");
  std::vector<InstructionTemplate> out;
  for (std::size_t i = 0; i < list->size(); ++i) {
    try {
      out.push_back(template_from_json((*list)[i]));
    } catch (const Error& e) {
      throw Error(e.code(), path.string() + ": template #" + std::to_string(i) + ": " + e.message());
    }
  }
  return out;
}

std::vector<std::string> read_seeds(const std::filesystem::path& path) {
  std::istringstream in(jsonl::read_text_file(path));
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto trimmed = textstat::trim_right(textstat::trim_left(line));
    if (!trimmed.empty()) out.emplace_back(trimmed);
  }
  return out;
}

json to_json(const PromptRecord& r) {
  return json{{"prompt_id", r.prompt_id},
              {"base_instruction", r.base_instruction},
              {"rendered_prompt", r.rendered_prompt},
              {"spec", constraints::to_json(r.spec)},
              {"pass_ratio", r.pass_ratio ? json(*r.pass_ratio) : json(nullptr)},
              {"bucket", to_string(r.bucket)}};
}

PromptRecord prompt_record_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kSchema, "prompt record must be an object");
  PromptRecord r;
  try {
    r.prompt_id = j.at("prompt_id").get<std::string>();
    r.base_instruction = j.value("base_instruction", std::string());
    r.rendered_prompt = j.value("rendered_prompt", std::string());
    r.spec = constraints::spec_from_json(j.at("spec"));
    if (const auto it = j.find("pass_ratio"); it != j.end() && !it->is_null()) {
      r.pass_ratio = it->get<double>();
    }
    const auto name = j.value("bucket", std::string("unfiltered"));
    const auto b = bucket_from_string(name);
    if (!b) throw Error(ErrorCode::kSchema, "unknown bucket '" + name + "'");
    r.bucket = *b;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchema, std::string("bad prompt record: ") + e.what());
  }
  if (r.bucket != Bucket::kUnfiltered && !r.pass_ratio) {
    throw Error(ErrorCode::kSchema, "prompt record '" + r.prompt_id + "' is bucketed without pass_ratio");
  }
  return r;
}

}  // namespace ifrl::synthesis
