#include "commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ifrl/coldstart.hpp"
#include "ifrl/constraints.hpp"
#include "ifrl/error.hpp"
#include "ifrl/jsonl.hpp"
#include "ifrl/model_client.hpp"
#include "ifrl/reward_shaping.hpp"
#include "ifrl/signal_math.hpp"
#include "ifrl/synthesis.hpp"
#include "ifrl/textstat.hpp"
#include "ifrl/token_records.hpp"
#include "json_config.hpp"
#include "run_manifest.hpp"

#ifndef IFRL_VERSION
#define IFRL_VERSION "0.0.0"
#endif

namespace ifrl::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

inline constexpr std::string_view kResponsesSchema = "responses_v1";
inline constexpr std::string_view kVerificationSchema = "verification_v1";

int exit_code_for(ErrorCode code) {
  if (code == ErrorCode::kIo) return kExitIo;
  if (is_client_error(code)) return kExitUpstream;
  return kExitValidation;
}

fs::path manifest_path(const std::string& explicit_path, const fs::path& out) {
  if (!explicit_path.empty()) return explicit_path;
  auto p = out;
  p += ".manifest.json";
  return p;
}

void write_text(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorCode::kIo, "cannot create " + path.parent_path().string());
  }
  jsonl::write_file_atomic(path, contents);
}

// ---- verify ------------------------------------------------------------------

struct VerifyArgs {
  std::string spec;
  std::string responses;
  std::string out;
  std::string manifest;
};

// A single spec object, an array of specs, or JSONL with one spec per line.
std::map<std::string, constraints::ConstraintSpec> load_specs(const fs::path& path) {
  const auto text = jsonl::read_text_file(path);
  std::vector<std::pair<std::size_t, json>> values;
  try {
    auto whole = json::parse(text);
    if (whole.is_array()) {
      for (std::size_t i = 0; i < whole.size(); ++i) values.emplace_back(i + 1, whole[i]);
    } else {
      values.emplace_back(1, std::move(whole));
    }
  } catch (const json::parse_error&) {
    std::istringstream in(text);
    const auto doc = jsonl::read(in, path.string());
    // Spec objects carry their own "schema" key, so a leading spec may be
    // mistaken for a header.
    if (doc.header && doc.header->contains("items")) values.emplace_back(1, *doc.header);
    for (const auto& line : doc.records) values.emplace_back(line.number, line.value);
  }
  std::map<std::string, constraints::ConstraintSpec> specs;
  for (const auto& [number, value] : values) {
    auto spec = jsonl::at_line(path.string(), jsonl::Line{number, value},
                               [](const json& j) { return constraints::spec_from_json(j); });
    const auto id = spec.spec_id;
    if (!specs.emplace(id, std::move(spec)).second) {
      throw Error(ErrorCode::kSchema, path.string() + ": duplicate spec_id '" + id + "'");
    }
  }
  if (specs.empty()) throw Error(ErrorCode::kSchema, path.string() + ": no specs");
  return specs;
}

int cmd_verify(const VerifyArgs& a, std::ostream& out) {
  RunManifest manifest;
  manifest.command = "verify";
  const auto specs = load_specs(a.spec);
  const auto doc = jsonl::read_file(a.responses);
  jsonl::expect_schema(doc, kResponsesSchema, a.responses);

  std::ostringstream body;
  jsonl::write_line(body, jsonl::make_header(kVerificationSchema));
  std::size_t satisfied = 0;
  double dense_sum = 0.0;
  double sparse_sum = 0.0;
  for (std::size_t i = 0; i < doc.records.size(); ++i) {
    const auto& line = doc.records[i];
    jsonl::at_line(a.responses, line, [&](const json& j) {
      const auto response = j.at("response").get<std::string>();
      std::string spec_id;
      if (const auto it = j.find("spec_id"); it != j.end() && !it->is_null()) {
        spec_id = it->get<std::string>();
      } else if (specs.size() == 1) {
        spec_id = specs.begin()->first;
      } else {
        throw Error(ErrorCode::kSchema, "spec_id is required when several specs are loaded");
      }
      const auto spec = specs.find(spec_id);
      if (spec == specs.end()) throw Error(ErrorCode::kSchema, "unknown spec_id '" + spec_id + "'");
      const json id = j.contains("id") ? j["id"] : json(std::to_string(i));

      const auto split = textstat::extract_answer(response);
      const auto report = constraints::verify(split.answer, spec->second);
      const auto dense = constraints::dense_reward(report);
      const auto sparse = constraints::sparse_reward(report);
      satisfied += report.all_satisfied ? 1 : 0;
      dense_sum += dense.r_c;
      sparse_sum += sparse;
      jsonl::write_line(body, json{{"id", id},
                                   {"spec_id", spec_id},
                                   {"had_think_block", split.had_think_block},
                                   {"report", constraints::to_json(report)},
                                   {"dense", constraints::to_json(dense)},
                                   {"sparse", sparse}});
    });
  }
  write_text(a.out, body.str());

  const auto n = doc.records.size();
  manifest.config = json::object();
  manifest.inputs = {{"spec", a.spec}, {"responses", a.responses}};
  manifest.outputs = {{"reports", a.out}};
  manifest.counts = {{"responses", n},
                     {"all_satisfied", satisfied},
                     {"mean_dense_r_c", n ? dense_sum / static_cast<double>(n) : 0.0},
                     {"mean_sparse", n ? sparse_sum / static_cast<double>(n) : 0.0}};
  manifest.write(manifest_path(a.manifest, a.out));
  out << manifest.counts.dump() << '\n';
  return kExitOk;
}

// ---- synth -------------------------------------------------------------------

struct SynthArgs {
  std::string seeds;
  std::string templates;
  std::string client_config;
  std::string out_dir;
  std::uint64_t seed = 0;
  int k = synthesis::kDefaultSamplesPerPrompt;
  int templates_per_base = synthesis::kDefaultTemplatesPerBase;
  int max_tokens = 2048;
  double temperature = 1.0;
  int max_in_flight = 4;
  int expand_per_seed = 0;
};

std::optional<fs::path> optional_path(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return fs::path(s);
}

int cmd_synth(const SynthArgs& a, std::ostream& out, std::ostream& err) {
  RunManifest manifest;
  manifest.command = "synth";
  auto seeds = synthesis::read_seeds(a.seeds);
  const auto templates = synthesis::read_templates(a.templates);
  const auto client_config = client::load_client_config(optional_path(a.client_config));
  const auto client = client::make_client(client_config);

  if (a.expand_per_seed > 0) seeds = synthesis::expand_seeds(seeds, *client, a.expand_per_seed, a.seed);

  synthesis::SynthesisConfig config;
  config.seed = a.seed;
  config.templates_per_base = a.templates_per_base;
  config.sampling = {a.k, a.max_tokens, a.temperature};
  config.max_in_flight = a.max_in_flight;

  const auto result = synthesis::run_synthesis(seeds, templates, *client, config);
  const auto dataset_manifest = synthesis::build_manifest(result, seeds, templates, *client, config);
  const fs::path out_dir = a.out_dir;
  synthesis::write_dataset(out_dir, result, dataset_manifest);

  for (const auto& f : result.failures) err << "warning: " << f.prompt_id << ": " << f.message << '\n';
  if (result.records.empty() && !result.failures.empty()) {
    const bool upstream = std::any_of(result.failures.begin(), result.failures.end(),
                                      [](const auto& f) { return is_client_error(f.code); });
    err << "error: every prompt failed\n";
    return upstream ? kExitUpstream : kExitValidation;
  }

  manifest.config = {{"seed", a.seed},
                     {"k", a.k},
                     {"templates_per_base", a.templates_per_base},
                     {"max_tokens", a.max_tokens},
                     {"temperature", a.temperature},
                     {"expand_per_seed", a.expand_per_seed},
                     {"client", client->describe()}};
  manifest.inputs = {{"seeds", a.seeds}, {"templates", a.templates}};
  if (!a.client_config.empty()) manifest.inputs["client_config"] = a.client_config;
  for (const char* name : {"pass.jsonl", "easy.jsonl", "hard.jsonl", "manifest.json"}) {
    manifest.outputs[name] = (out_dir / name).string();
  }
  manifest.counts = dataset_manifest["counts"];
  manifest.write(out_dir / "run_manifest.json");
  out << manifest.counts.dump() << '\n';
  return kExitOk;
}

// ---- coldstart ---------------------------------------------------------------

struct ColdstartArgs {
  std::string samples;
  std::string judge_config;
  std::string judge_template;
  std::string out;
  std::string audit;
  std::string judged;
  std::string manifest;
  int min_score = coldstart::kDefaultMinScore;
  std::size_t top_n = coldstart::kDefaultTopN;
  std::int64_t min_tokens = coldstart::kDefaultMinTokens;
  bool balance_languages = false;
  int max_in_flight = 4;
  int judge_retries = 1;
  int judge_max_tokens = 1024;
  double judge_temperature = 0.0;
};

int cmd_coldstart(const ColdstartArgs& a, std::ostream& out) {
  RunManifest manifest;
  manifest.command = "coldstart";
  auto samples = coldstart::read_samples(fs::path(a.samples));
  const auto judge_config = client::load_client_config(optional_path(a.judge_config));
  const auto judge = client::make_client(judge_config);

  coldstart::ColdstartConfig config;
  config.min_score = a.min_score;
  config.top_n = a.top_n;
  config.min_tokens = a.min_tokens;
  config.balance_languages = a.balance_languages;
  config.max_in_flight = a.max_in_flight;
  config.judge_retries = a.judge_retries;
  config.judge_max_tokens = a.judge_max_tokens;
  config.judge_temperature = a.judge_temperature;
  if (!a.judge_template.empty()) config.judge_template_text = jsonl::read_text_file(a.judge_template);

  const auto input_count = samples.size();
  const auto result = coldstart::coldstart_filter(std::move(samples), *judge, config);

  const fs::path out_path = a.out;
  fs::path audit_path = a.audit;
  if (audit_path.empty()) {
    audit_path = out_path;
    audit_path.replace_extension(".audit.jsonl");
  }
  std::ostringstream selected, audit;
  coldstart::write_samples(selected, result.selected);
  coldstart::write_audit(audit, result.audit);
  write_text(out_path, selected.str());
  write_text(audit_path, audit.str());
  if (!a.judged.empty()) {
    std::ostringstream judged;
    coldstart::write_samples(judged, result.judged);
    write_text(a.judged, judged.str());
  }

  std::map<std::string, std::size_t> rejected;
  for (const auto& e : result.audit) ++rejected[std::string(coldstart::to_string(e.stage))];
  const auto reached_judge = static_cast<std::size_t>(std::count_if(
      result.judged.begin(), result.judged.end(),
      [](const auto& s) { return s.checks.thinking.value_or(false); }));
  const auto judge_errors = static_cast<std::size_t>(std::count_if(
      result.audit.begin(), result.audit.end(), [](const auto& e) {
        return e.stage == coldstart::Stage::kFluency && e.reason.rfind("judge error:", 0) == 0;
      }));
  if (reached_judge > 0 && judge_errors == reached_judge) {
    throw Error(ErrorCode::kClientError,
                "judge failed for every sample that reached it (see " + audit_path.string() + ")");
  }

  manifest.config = {{"min_score", a.min_score},
                     {"top_n", a.top_n},
                     {"min_tokens", a.min_tokens},
                     {"balance_languages", a.balance_languages},
                     {"judge_retries", a.judge_retries},
                     {"judge_max_tokens", a.judge_max_tokens},
                     {"judge_temperature", a.judge_temperature},
                     {"judge_template_version",
                      a.judge_template.empty() ? std::string(coldstart::kJudgeTemplateVersion)
                                               : "custom"},
                     {"judge", judge->describe()}};
  manifest.inputs = {{"samples", a.samples}};
  if (!a.judge_config.empty()) manifest.inputs["judge_config"] = a.judge_config;
  if (!a.judge_template.empty()) manifest.inputs["judge_template"] = a.judge_template;
  manifest.outputs = {{"selected", out_path.string()}, {"audit", audit_path.string()}};
  if (!a.judged.empty()) manifest.outputs["judged"] = a.judged;
  manifest.counts = {{"input", input_count},
                     {"selected", result.selected.size()},
                     {"rejected", rejected},
                     {"judge_calls", result.judge_calls}};
  manifest.write(manifest_path(a.manifest, out_path));
  out << manifest.counts.dump() << '\n';
  return kExitOk;
}

// ---- signal ------------------------------------------------------------------

struct SignalArgs {
  std::string records;
  std::string params;
  std::string out;
  std::string manifest;
  std::string selection;
  double r_percent = signal::kDefaultRPercent;
  double alpha = signal::kDefaultAlpha;
  std::string reading = "selected_fraction";
  double tau = signal::kDefaultTau;
  double c = signal::kDefaultCap;
  double lambda = signal::kDefaultLambda;
  std::string scope = "batch";
  std::optional<double> l_grpo;
  std::size_t top_k = signal::kDefaultReportTopK;
  std::size_t min_freq = signal::kDefaultReportMinFreq;
};

// Values from --params fill options that neither the command line nor --config set.
void apply_params(const std::string& path, CLI::App* sub, SignalArgs& a) {
  if (path.empty()) return;
  json p;
  try {
    p = json::parse(jsonl::read_text_file(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kSchema, path + ": " + e.what());
  }
  if (!p.is_object()) throw Error(ErrorCode::kSchema, path + ": params must be a JSON object");
  const auto unset = [&](const char* flag) {
    const auto* opt = sub->get_option_no_throw(flag);
    return opt != nullptr && opt->count() == 0;
  };
  try {
    for (const auto& [key, value] : p.items()) {
      if (key == "r_percent" || key == "r") {
        if (unset("--r")) a.r_percent = value.get<double>();
      } else if (key == "alpha") {
        if (unset("--alpha")) a.alpha = value.get<double>();
      } else if (key == "reading") {
        if (unset("--reading")) a.reading = value.get<std::string>();
      } else if (key == "tau") {
        if (unset("--tau")) a.tau = value.get<double>();
      } else if (key == "c") {
        if (unset("--c")) a.c = value.get<double>();
      } else if (key == "lambda") {
        if (unset("--lambda")) a.lambda = value.get<double>();
      } else if (key == "scope") {
        if (unset("--scope")) a.scope = value.get<std::string>();
      } else if (key == "l_grpo") {
        if (unset("--l-grpo")) a.l_grpo = value.get<double>();
      } else if (key == "top_k") {
        if (unset("--top-k")) a.top_k = value.get<std::size_t>();
      } else if (key == "min_freq") {
        if (unset("--min-freq")) a.min_freq = value.get<std::size_t>();
      } else {
        throw Error(ErrorCode::kSchema, path + ": unknown parameter '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchema, path + ": " + e.what());
  }
}

signal::QuantileReading parse_reading(const std::string& s) {
  if (s == "selected_fraction") return signal::QuantileReading::kSelectedFraction;
  if (s == "literal") return signal::QuantileReading::kLiteral;
  throw Error(ErrorCode::kInvalidArgument, "reading must be selected_fraction or literal");
}

signal::CovarianceScope parse_scope(const std::string& s) {
  if (s == "batch") return signal::CovarianceScope::kBatch;
  if (s == "sequence") return signal::CovarianceScope::kSequence;
  throw Error(ErrorCode::kInvalidArgument, "scope must be batch or sequence");
}

RunManifest signal_manifest(const std::string& name, const SignalArgs& a) {
  RunManifest m;
  m.command = "signal " + name;
  m.inputs = {{"records", a.records}};
  if (!a.params.empty()) m.inputs["params"] = a.params;
  return m;
}

int cmd_signal_select(const SignalArgs& a, std::ostream& out) {
  auto manifest = signal_manifest("select", a);
  const auto records = signal::read_token_records(fs::path(a.records));
  const auto selection = signal::sft_select(records, a.r_percent, a.alpha, parse_reading(a.reading));
  std::ostringstream body;
  signal::write_selection(body, selection, json{{"reading", a.reading}, {"tokens", records.size()}});
  write_text(a.out, body.str());

  manifest.config = {{"r_percent", a.r_percent}, {"alpha", a.alpha}, {"reading", a.reading}};
  manifest.outputs = {{"selection", a.out}};
  manifest.counts = {{"tokens", records.size()},
                     {"selected", selection.selected.size()},
                     {"tie_admitted", selection.tie_admitted},
                     {"threshold", selection.threshold}};
  manifest.write(manifest_path(a.manifest, a.out));
  out << manifest.counts.dump() << '\n';
  return kExitOk;
}

int cmd_signal_tea(const SignalArgs& a, std::ostream& out) {
  auto manifest = signal_manifest("tea", a);
  const auto records = signal::read_token_records(fs::path(a.records));
  if (records.empty()) throw Error(ErrorCode::kEmptyBatch, a.records + ": no token records");
  signal::validate_batch(records);
  const auto tea = signal::tea_loss(records, a.tau, a.c, parse_scope(a.scope));

  json header = jsonl::make_header(signal::kTeaSchema);
  header.update(json{{"tau", a.tau},
                     {"c", a.c},
                     {"lambda", a.lambda},
                     {"scope", a.scope},
                     {"tokens", records.size()},
                     {"l_tea", tea.l_tea}});
  if (a.l_grpo) {
    header["l_grpo"] = *a.l_grpo;
    header["objective"] = signal::combined_objective(*a.l_grpo, tea.l_tea, a.lambda);
  }
  std::ostringstream body;
  jsonl::write_line(body, header);
  for (std::size_t i = 0; i < records.size(); ++i) {
    jsonl::write_line(body, json{{"sample_id", records[i].sample_id},
                                 {"position", records[i].position},
                                 {"covariance", tea.covariances[i]},
                                 {"coefficient", tea.coefficients[i]}});
  }
  write_text(a.out, body.str());

  manifest.config = {{"tau", a.tau}, {"c", a.c}, {"lambda", a.lambda}, {"scope", a.scope}};
  if (a.l_grpo) manifest.config["l_grpo"] = *a.l_grpo;
  manifest.outputs = {{"tea", a.out}};
  manifest.counts = {{"tokens", records.size()}, {"l_tea", tea.l_tea}};
  if (a.l_grpo) manifest.counts["objective"] = header["objective"];
  manifest.write(manifest_path(a.manifest, a.out));
  out << manifest.counts.dump() << '\n';
  return kExitOk;
}

int cmd_signal_report(const SignalArgs& a, std::ostream& out) {
  auto manifest = signal_manifest("report", a);
  const auto records = signal::read_token_records(fs::path(a.records));
  const auto rows = signal::token_entropy_report(records, a.top_k, a.min_freq);
  json header = jsonl::make_header(signal::kEntropyReportSchema);
  header.update(json{{"top_k", a.top_k}, {"min_freq", a.min_freq}, {"tokens", records.size()}});
  std::ostringstream body;
  jsonl::write_line(body, header);
  for (const auto& row : rows) {
    jsonl::write_line(body, json{{"token_text", row.token_text},
                                 {"mean_entropy", row.mean_entropy},
                                 {"frequency", row.frequency}});
  }
  write_text(a.out, body.str());

  manifest.config = {{"top_k", a.top_k}, {"min_freq", a.min_freq}};
  manifest.outputs = {{"report", a.out}};
  manifest.counts = {{"tokens", records.size()}, {"rows", rows.size()}};
  manifest.write(manifest_path(a.manifest, a.out));
  out << manifest.counts.dump() << '\n';
  return kExitOk;
}

int cmd_signal_loss(const SignalArgs& a, std::ostream& out) {
  auto manifest = signal_manifest("loss", a);
  const auto records = signal::read_token_records(fs::path(a.records));
  const auto selection = signal::read_selection(fs::path(a.selection));
  const double loss = signal::entropy_sft_loss(records, selection);
  const json result{{"loss", loss}, {"selected", selection.selected.size()}};
  manifest.inputs["selection"] = a.selection;
  manifest.counts = result;
  if (!a.out.empty()) {
    write_text(a.out, result.dump(2) + "\n");
    manifest.outputs = {{"loss", a.out}};
  }
  if (!a.out.empty() || !a.manifest.empty()) manifest.write(manifest_path(a.manifest, a.out));
  out << result.dump() << '\n';
  return kExitOk;
}

// ---- reward ------------------------------------------------------------------

struct RewardArgs {
  double rc = 0.0;
  std::int64_t length = 0;
  std::int64_t lmax = 0;
  double threshold = reward_shaping::kDefaultCorrectnessThreshold;
  std::string manifest;
};

int cmd_reward(const RewardArgs& a, std::ostream& out) {
  RunManifest manifest;
  manifest.command = "reward";
  const reward_shaping::LengthRewardParams params{a.lmax, a.threshold};
  const double r_l = reward_shaping::length_reward(a.rc, a.length, params);
  const json result{{"r_c", a.rc}, {"r_l", r_l}, {"total", reward_shaping::total_reward(a.rc, r_l)}};
  if (!a.manifest.empty()) {
    manifest.config = {{"rc", a.rc}, {"length", a.length}, {"lmax", a.lmax}, {"threshold", a.threshold}};
    manifest.counts = result;
    manifest.write(a.manifest);
  }
  out << result.dump() << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Constraint verification, reward shaping, prompt synthesis and token-signal tools",
               "ifrl"};
  app.set_version_flag("--version", IFRL_VERSION);
  app.require_subcommand(1);
  app.fallthrough();
  app.config_formatter(std::make_shared<JsonConfig>(&app));
  app.set_config("--config", "", "JSON file of option values; explicit flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);

  std::function<int()> action;

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Verify responses against constraint specs");
  verify->add_option("--spec", va.spec, "Spec JSON (object or array) or JSONL")->required();
  verify->add_option("--responses", va.responses, "JSONL of {id?, spec_id?, response}")->required();
  verify->add_option("--out", va.out, "Output JSONL of reports and rewards")->required();
  verify->add_option("--manifest", va.manifest, "Run manifest path (default <out>.manifest.json)");
  verify->callback([&] { action = [&] { return cmd_verify(va, out); }; });

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "Synthesize and bucket constrained prompts");
  synth->add_option("--seeds", sa.seeds, "Base instructions, one per line")->required();
  synth->add_option("--templates", sa.templates, "Template JSON file")->required();
  synth->add_option("--client-config", sa.client_config, "Generation client JSON config");
  synth->add_option("--out-dir", sa.out_dir, "Output directory")->required();
  synth->add_option("--k", sa.k, "Samples per prompt")->capture_default_str()->check(CLI::PositiveNumber);
  synth->add_option("--seed", sa.seed, "Sampling seed")->capture_default_str();
  synth->add_option("--templates-per-base", sa.templates_per_base, "Variants per base instruction")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  synth->add_option("--max-tokens", sa.max_tokens)->capture_default_str()->check(CLI::PositiveNumber);
  synth->add_option("--temperature", sa.temperature)->capture_default_str()->check(CLI::NonNegativeNumber);
  synth->add_option("--max-in-flight", sa.max_in_flight)->capture_default_str()->check(CLI::PositiveNumber);
  synth->add_option("--expand-per-seed", sa.expand_per_seed, "New instructions generated per seed")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  synth->callback([&] { action = [&] { return cmd_synth(sa, out, err); }; });

  ColdstartArgs ca;
  auto* cold = app.add_subcommand("coldstart", "Filter cold-start samples");
  cold->add_option("--samples", ca.samples, "JSONL of candidate samples")->required();
  cold->add_option("--judge-config", ca.judge_config, "Judge client JSON config");
  cold->add_option("--judge-template", ca.judge_template, "Custom judge template text file");
  cold->add_option("--out", ca.out, "Selected samples JSONL")->required();
  cold->add_option("--audit", ca.audit, "Audit log JSONL (default <out stem>.audit.jsonl)");
  cold->add_option("--judged", ca.judged, "Write every sample with its checks here");
  cold->add_option("--manifest", ca.manifest, "Run manifest path (default <out>.manifest.json)");
  cold->add_option("--min-score", ca.min_score)->capture_default_str()->check(CLI::Range(1, 10));
  cold->add_option("--top-n", ca.top_n)->capture_default_str();
  cold->add_option("--min-tokens", ca.min_tokens)->capture_default_str()->check(CLI::PositiveNumber);
  cold->add_flag("--balance-languages", ca.balance_languages, "Split top-n evenly between zh and en");
  cold->add_option("--max-in-flight", ca.max_in_flight)->capture_default_str()->check(CLI::PositiveNumber);
  cold->add_option("--judge-retries", ca.judge_retries)->capture_default_str()->check(CLI::NonNegativeNumber);
  cold->add_option("--judge-max-tokens", ca.judge_max_tokens)->capture_default_str()->check(CLI::PositiveNumber);
  cold->add_option("--judge-temperature", ca.judge_temperature)
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  cold->callback([&] { action = [&] { return cmd_coldstart(ca, out); }; });

  SignalArgs ga;
  auto* sig = app.add_subcommand("signal", "Token-signal kernels over token-record JSONL");
  sig->require_subcommand(1);
  auto common = [&](CLI::App* sub, bool needs_out) {
    sub->add_option("--records", ga.records, "Token-record JSONL")->required();
    sub->add_option("--params", ga.params, "JSON parameter file; explicit flags take precedence");
    auto* o = sub->add_option("--out", ga.out, "Output JSONL");
    if (needs_out) o->required();
    sub->add_option("--manifest", ga.manifest, "Run manifest path (default <out>.manifest.json)");
  };
  auto* select = sig->add_subcommand("select", "Entropy-aware SFT token selection");
  common(select, true);
  select->add_option("--r", ga.r_percent, "Percent of tokens to select")->capture_default_str();
  select->add_option("--alpha", ga.alpha, "Entropy weight")->capture_default_str();
  select->add_option("--reading", ga.reading, "selected_fraction | literal")->capture_default_str();
  select->callback([&] {
    action = [&, select] {
      apply_params(ga.params, select, ga);
      return cmd_signal_select(ga, out);
    };
  });
  auto* tea = sig->add_subcommand("tea", "Entropy-adaptive regulariser coefficients and loss");
  common(tea, true);
  tea->add_option("--tau", ga.tau)->capture_default_str();
  tea->add_option("--c", ga.c, "Coefficient cap numerator")->capture_default_str();
  tea->add_option("--lambda", ga.lambda)->capture_default_str();
  tea->add_option("--scope", ga.scope, "batch | sequence")->capture_default_str();
  tea->add_option("--l-grpo", ga.l_grpo, "Policy loss to combine with the regulariser");
  tea->callback([&] {
    action = [&, tea] {
      apply_params(ga.params, tea, ga);
      return cmd_signal_tea(ga, out);
    };
  });
  auto* report = sig->add_subcommand("report", "High-entropy token report");
  common(report, true);
  report->add_option("--top-k", ga.top_k)->capture_default_str();
  report->add_option("--min-freq", ga.min_freq)->capture_default_str();
  report->callback([&] {
    action = [&, report] {
      apply_params(ga.params, report, ga);
      return cmd_signal_report(ga, out);
    };
  });
  auto* loss = sig->add_subcommand("loss", "Mean NLL over a selection");
  common(loss, false);
  loss->add_option("--selection", ga.selection, "Selection JSONL from 'signal select'")->required();
  loss->callback([&] {
    action = [&, loss] {
      apply_params(ga.params, loss, ga);
      return cmd_signal_loss(ga, out);
    };
  });

  RewardArgs ra;
  auto* reward = app.add_subcommand("reward", "Length-shaped reward for one rollout");
  reward->add_option("--rc", ra.rc, "Correctness reward in [0, 1]")->required();
  reward->add_option("--length", ra.length, "Response length")->required();
  reward->add_option("--lmax", ra.lmax, "Length budget")->required();
  reward->add_option("--threshold", ra.threshold, "Correctness threshold")->capture_default_str();
  reward->add_option("--manifest", ra.manifest, "Optional run manifest path");
  reward->callback([&] { action = [&] { return cmd_reward(ra, out); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::FileError& e) {
    app.exit(e, out, err);
    return kExitIo;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitValidation;
  }

  if (!action) return kExitValidation;
  try {
    return action();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
}

}  // namespace ifrl::cli
