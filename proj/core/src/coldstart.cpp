#include "ifrl/coldstart.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <set>

#include <nlohmann/json.hpp>

#include "ifrl/error.hpp"
#include "ifrl/jsonl.hpp"
#include "parallel.hpp"

namespace ifrl::coldstart {
namespace {

using nlohmann::json;

bool blank(std::string_view s) { return textstat::trim_left(s).empty(); }

std::string failed_items(const constraints::VerificationReport& report) {
  std::string out;
  for (std::size_t i = 0; i < report.items.size(); ++i) {
    if (report.items[i].satisfied) continue;
    if (!out.empty()) out += ", ";
    out += "#" + std::to_string(i) + " " + std::string(constraints::to_string(report.items[i].item.kind));
  }
  return out;
}

struct JudgeOutcome {
  std::optional<int> score;
  std::string reason;
  std::size_t calls = 0;
};

JudgeOutcome judge_one(const CandidateSample& sample, client::GenerationClient& judge,
                       const ColdstartConfig& config) {
  JudgeOutcome outcome;
  try {
    const auto& tmpl = config.judge_template_text
                           ? std::string_view(*config.judge_template_text)
                           : judge_template(sample.prompt.spec.language);
    client::GenerationRequest request;
    request.prompt = build_judge_prompt(sample.prompt.rendered_prompt, sample.split.answer, tmpl);
    request.n = 1;
    request.max_tokens = config.judge_max_tokens;
    request.temperature = config.judge_temperature;
    for (int attempt = 0; attempt <= config.judge_retries; ++attempt) {
      request.seed = attempt;
      ++outcome.calls;
      const auto response = judge.generate(request);
      try {
        outcome.score = parse_judge_score(response.completions.at(0));
        outcome.reason.clear();
        return outcome;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kNoScoreFound && e.code() != ErrorCode::kScoreOutOfRange) throw;
        outcome.reason = "unusable judge output after " + std::to_string(attempt + 1) +
                         " attempt(s): " + e.what();
      }
    }
  } catch (const std::exception& e) {
    outcome.score.reset();
    outcome.reason = std::string("judge error: ") + e.what();
  }
  return outcome;
}

void validate(const ColdstartConfig& config) {
  if (config.min_tokens < 1) throw Error(ErrorCode::kInvalidArgument, "min_tokens must be >= 1");
  if (config.max_in_flight < 1) throw Error(ErrorCode::kInvalidArgument, "max_in_flight must be >= 1");
  if (config.judge_retries < 0) throw Error(ErrorCode::kInvalidArgument, "judge_retries must be >= 0");
  if (!config.counter) throw Error(ErrorCode::kInvalidArgument, "token counter is empty");
}

}  // namespace

CandidateSample make_sample(std::string sample_id, synthesis::PromptRecord prompt,
                            std::string raw_response) {
  CandidateSample s;
  s.sample_id = std::move(sample_id);
  s.prompt = std::move(prompt);
  s.split = textstat::extract_answer(raw_response);
  s.raw_response = std::move(raw_response);
  return s;
}

bool thinking_check(const textstat::AnswerSplit& split, std::int64_t min_tokens,
                    const textstat::TokenCounter& counter) {
  if (min_tokens < 1) throw Error(ErrorCode::kInvalidArgument, "min_tokens must be >= 1");
  return static_cast<std::int64_t>(counter(split.reasoning)) >= min_tokens;
}

std::string build_judge_prompt(std::string_view question, std::string_view answer,
                               std::string_view template_text) {
  if (blank(question)) throw Error(ErrorCode::kEmptyField, "question is empty");
  if (blank(answer)) throw Error(ErrorCode::kEmptyField, "answer is empty");
  if (template_text.find(kQuestionPlaceholder) == std::string_view::npos ||
      template_text.find(kAnswerPlaceholder) == std::string_view::npos) {
    throw Error(ErrorCode::kInvalidArgument, "judge template must contain <question> and <answer>");
  }
  std::string out;
  out.reserve(template_text.size() + question.size() + answer.size());
  std::size_t pos = 0;
  while (pos < template_text.size()) {
    const auto q = template_text.find(kQuestionPlaceholder, pos);
    const auto a = template_text.find(kAnswerPlaceholder, pos);
    const auto next = std::min(q, a);
    if (next == std::string_view::npos) break;
    out.append(template_text.substr(pos, next - pos));
    if (next == q) {
      out.append(question);
      pos = next + kQuestionPlaceholder.size();
    } else {
      out.append(answer);
      pos = next + kAnswerPlaceholder.size();
    }
  }
  if (pos < template_text.size()) out.append(template_text.substr(pos));
  return out;
}

std::string build_judge_prompt(std::string_view question, std::string_view answer,
                               constraints::Language language) {
  return build_judge_prompt(question, answer, judge_template(language));
}

int parse_judge_score(std::string_view judge_output) {
  static const std::regex pattern(R"(\[\[\s*([+-]?\d+)\s*\]\])");
  const std::string text(judge_output);
  std::smatch last;
  bool found = false;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), pattern); it != std::sregex_iterator();
       ++it) {
    last = *it;
    found = true;
  }
  if (!found) throw Error(ErrorCode::kNoScoreFound, "no [[n]] score in judge output");
  const std::string digits = last[1].str();
  const auto body = digits.find_first_not_of("+-0");
  const bool negative = digits[0] == '-';
  // Anything longer than two significant digits is out of range; avoids stoi overflow.
  const bool huge = body != std::string::npos && digits.size() - body > 2;
  const int value = huge || body == std::string::npos ? 0 : std::stoi(digits.substr(body));
  if (negative || huge || value < 1 || value > 10) {
    throw Error(ErrorCode::kScoreOutOfRange, "judge score " + digits + " outside 1..10");
  }
  return value;
}

std::string_view to_string(Stage stage) noexcept {
  switch (stage) {
    case Stage::kCorrectness: return "correctness";
    case Stage::kThinking: return "thinking";
    case Stage::kFluency: return "fluency";
    case Stage::kTopN: return "top_n";
  }
  return "correctness";
}

ColdstartResult coldstart_filter(std::vector<CandidateSample> samples,
                                 client::GenerationClient& judge, const ColdstartConfig& config) {
  validate(config);
  {
    std::set<std::string_view> ids;
    for (const auto& s : samples) {
      if (!ids.insert(s.sample_id).second) {
        throw Error(ErrorCode::kInvalidArgument, "duplicate sample_id '" + s.sample_id + "'");
      }
    }
  }

  const std::size_t n = samples.size();
  std::vector<std::optional<AuditEntry>> rejection(n);
  auto reject = [&](std::size_t i, Stage stage, std::string reason) {
    rejection[i] = AuditEntry{samples[i].sample_id, stage, false, std::move(reason)};
  };

  std::vector<std::size_t> to_judge;
  for (std::size_t i = 0; i < n; ++i) {
    auto& s = samples[i];
    s.checks = {};
    try {
      const auto report = constraints::verify(s.split.answer, s.prompt.spec);
      s.checks.correct = report.all_satisfied;
      if (!report.all_satisfied) {
        reject(i, Stage::kCorrectness, "unsatisfied: " + failed_items(report));
        continue;
      }
    } catch (const Error& e) {
      s.checks.correct = false;
      reject(i, Stage::kCorrectness, e.what());
      continue;
    }
    const auto units = config.counter(s.split.reasoning);
    s.checks.thinking = static_cast<std::int64_t>(units) >= config.min_tokens;
    if (!*s.checks.thinking) {
      reject(i, Stage::kThinking, "reasoning has " + std::to_string(units) +
                                      " units, below min_tokens " + std::to_string(config.min_tokens));
      continue;
    }
    to_judge.push_back(i);
  }

  std::vector<JudgeOutcome> outcomes(to_judge.size());
  detail::parallel_for(to_judge.size(), config.max_in_flight, [&](std::size_t j) {
    outcomes[j] = judge_one(samples[to_judge[j]], judge, config);
  });

  ColdstartResult result;
  struct Ranked {
    std::size_t index;
    std::size_t units;
  };
  std::vector<Ranked> survivors;
  for (std::size_t j = 0; j < to_judge.size(); ++j) {
    const auto i = to_judge[j];
    const auto& outcome = outcomes[j];
    result.judge_calls += outcome.calls;
    samples[i].checks.fluency_score = outcome.score;
    if (!outcome.score) {
      reject(i, Stage::kFluency, outcome.reason);
    } else if (*outcome.score < config.min_score) {
      reject(i, Stage::kFluency, "fluency score " + std::to_string(*outcome.score) +
                                     " below min_score " + std::to_string(config.min_score));
    } else {
      survivors.push_back({i, config.counter(samples[i].split.reasoning)});
    }
  }

  std::sort(survivors.begin(), survivors.end(), [&](const Ranked& a, const Ranked& b) {
    if (a.units != b.units) return a.units > b.units;
    return samples[a.index].sample_id < samples[b.index].sample_id;
  });

  auto cut = [&](std::vector<Ranked>& pool, std::size_t quota, std::string_view label) {
    for (std::size_t r = quota; r < pool.size(); ++r) {
      reject(pool[r].index, Stage::kTopN,
             "rank " + std::to_string(r + 1) + std::string(label) + " exceeds quota " +
                 std::to_string(quota));
    }
    if (pool.size() > quota) pool.resize(quota);
  };

  std::vector<Ranked> kept;
  if (config.balance_languages) {
    std::vector<Ranked> zh, en;
    for (const auto& r : survivors) {
      (samples[r.index].prompt.spec.language == constraints::Language::kZh ? zh : en).push_back(r);
    }
    cut(zh, config.top_n / 2, " (zh)");
    cut(en, config.top_n - config.top_n / 2, " (en)");
    std::set<std::size_t> keep_set;
    for (const auto& r : zh) keep_set.insert(r.index);
    for (const auto& r : en) keep_set.insert(r.index);
    for (const auto& r : survivors) {
      if (keep_set.count(r.index)) kept.push_back(r);
    }
  } else {
    kept = survivors;
    cut(kept, config.top_n, "");
  }

  for (const auto& r : kept) result.selected.push_back(samples[r.index]);
  for (std::size_t i = 0; i < n; ++i) {
    if (rejection[i]) result.audit.push_back(std::move(*rejection[i]));
  }
  result.judged = std::move(samples);
  return result;
}

json to_json(const CandidateSample& s) {
  const auto opt = [](const auto& v) { return v ? json(*v) : json(nullptr); };
  return json{{"sample_id", s.sample_id},
              {"prompt", synthesis::to_json(s.prompt)},
              {"raw_response", s.raw_response},
              {"checks",
               {{"correct", opt(s.checks.correct)},
                {"thinking", opt(s.checks.thinking)},
                {"fluency_score", opt(s.checks.fluency_score)}}}};
}

CandidateSample sample_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kSchema, "sample must be an object");
  auto s = make_sample(j.at("sample_id").get<std::string>(),
                       synthesis::prompt_record_from_json(j.at("prompt")),
                       j.at("raw_response").get<std::string>());
  if (s.sample_id.empty()) throw Error(ErrorCode::kSchema, "sample_id must be non-empty");
  if (const auto it = j.find("checks"); it != j.end() && !it->is_null()) {
    const auto get = [&](const char* key, auto& field) {
      if (const auto f = it->find(key); f != it->end() && !f->is_null()) {
        field = f->get<typename std::decay_t<decltype(field)>::value_type>();
      }
    };
    get("correct", s.checks.correct);
    get("thinking", s.checks.thinking);
    get("fluency_score", s.checks.fluency_score);
    if (s.checks.fluency_score && (*s.checks.fluency_score < 1 || *s.checks.fluency_score > 10)) {
      throw Error(ErrorCode::kSchema, "fluency_score must lie in 1..10");
    }
  }
  return s;
}

json to_json(const AuditEntry& e) {
  return json{{"sample_id", e.sample_id},
              {"stage", to_string(e.stage)},
              {"verdict", e.kept ? "keep" : "reject"},
              {"reason", e.reason}};
}

std::vector<CandidateSample> read_samples(std::istream& in, std::string_view source) {
  const auto doc = jsonl::read(in, source);
  jsonl::expect_schema(doc, kSampleSchema, source);
  std::vector<CandidateSample> out;
  out.reserve(doc.records.size());
  for (const auto& line : doc.records) {
    out.push_back(jsonl::at_line(source, line, [](const json& j) { return sample_from_json(j); }));
  }
  return out;
}

std::vector<CandidateSample> read_samples(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return read_samples(in, path.string());
}

void write_samples(std::ostream& out, const std::vector<CandidateSample>& samples) {
  jsonl::write_line(out, jsonl::make_header(kSampleSchema));
  for (const auto& s : samples) jsonl::write_line(out, to_json(s));
}

void write_audit(std::ostream& out, const std::vector<AuditEntry>& audit) {
  jsonl::write_line(out, jsonl::make_header(kAuditSchema));
  for (const auto& e : audit) jsonl::write_line(out, to_json(e));
}

}  // namespace ifrl::coldstart
