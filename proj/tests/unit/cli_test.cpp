#include "commands.hpp"

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>
#include <sstream>

#include "fixtures.hpp"
#include "ifrl/coldstart.hpp"
#include "ifrl/jsonl.hpp"
#include "ifrl/token_records.hpp"
#include "templates.hpp"

namespace ifrl::cli {
namespace {

using nlohmann::json;
using testing::read_file;
using testing::TempDir;
using testing::write_file;

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

Outcome cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  Outcome o;
  o.code = run(args, out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

std::vector<json> jsonl_lines(const std::filesystem::path& p) {
  std::vector<json> out;
  std::istringstream in(read_file(p));
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(json::parse(line));
  }
  return out;
}

json one_sentence_spec() {
  return json::parse(R"({"schema":"spec_v1","spec_id":"s1","language":"en","items":[{"kind":"sentence_exact","n_exact":1}]})");
}

TEST(CliVerify, RoundTrip) {
  TempDir d;
  write_file(d / "spec.json", one_sentence_spec().dump());
  write_file(d / "resp.jsonl", "{\"schema\":\"responses_v1\"}\n"
                               "{\"id\":\"a\",\"response\":\"<think>x</think>Hi.\"}\n"
                               "{\"id\":\"b\",\"spec_id\":\"s1\",\"response\":\"Hi. Bye.\"}\n");
  const auto r = cli({"verify", "--spec", (d / "spec.json").string(), "--responses", (d / "resp.jsonl").string(),
                      "--out", (d / "out.jsonl").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = jsonl_lines(d / "out.jsonl");
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0]["schema"], "verification_v1");
  EXPECT_EQ(lines[1]["id"], "a");
  EXPECT_TRUE(lines[1]["had_think_block"].get<bool>());
  EXPECT_EQ(lines[1]["sparse"], 1.0);
  EXPECT_EQ(lines[2]["sparse"], 0.0);
  const auto m = json::parse(read_file(d / "out.jsonl.manifest.json"));
  EXPECT_EQ(m["schema"], "run_manifest_v1");
  EXPECT_EQ(m["command"], "verify");
  EXPECT_EQ(m["counts"]["responses"], 2);
  EXPECT_EQ(m["counts"]["all_satisfied"], 1);
  EXPECT_TRUE(m.contains("wall_time_ms"));
}

TEST(CliVerify, SpecAsJsonlWithLeadingSpec) {
  TempDir d;
  auto second = one_sentence_spec();
  second["spec_id"] = "s2";
  write_file(d / "specs.jsonl", one_sentence_spec().dump() + "\n" + second.dump() + "\n");
  write_file(d / "resp.jsonl", "{\"spec_id\":\"s2\",\"response\":\"Hi.\"}\n");
  const auto r = cli({"verify", "--spec", (d / "specs.jsonl").string(), "--responses",
                      (d / "resp.jsonl").string(), "--out", (d / "o.jsonl").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(jsonl_lines(d / "o.jsonl")[1]["spec_id"], "s2");
}

TEST(CliVerify, EmptyInputWritesHeaderAndManifest) {
  TempDir d;
  write_file(d / "spec.json", one_sentence_spec().dump());
  write_file(d / "resp.jsonl", "");
  const auto r = cli({"verify", "--spec", (d / "spec.json").string(), "--responses", (d / "resp.jsonl").string(),
                      "--out", (d / "out.jsonl").string(), "--manifest", (d / "m.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(jsonl_lines(d / "out.jsonl").size(), 1u);
  EXPECT_EQ(json::parse(read_file(d / "m.json"))["counts"]["responses"], 0);
}

TEST(CliVerify, ErrorsMapToExitCodes) {
  TempDir d;
  write_file(d / "spec.json", one_sentence_spec().dump());
  write_file(d / "resp.jsonl", "{\"response\":\"Hi.\"}\n{broken\n");
  const auto bad = cli({"verify", "--spec", (d / "spec.json").string(), "--responses",
                        (d / "resp.jsonl").string(), "--out", (d / "o.jsonl").string()});
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("resp.jsonl:2:"), std::string::npos) << bad.err;
  const auto missing = cli({"verify", "--spec", (d / "nope.json").string(), "--responses",
                            (d / "resp.jsonl").string(), "--out", (d / "o.jsonl").string()});
  EXPECT_EQ(missing.code, 1);
  write_file(d / "badspec.json", R"({"spec_id":"x","language":"en","items":[{"kind":"word_range","n_min":5,"n_max":1}]})");
  const auto invalid = cli({"verify", "--spec", (d / "badspec.json").string(), "--responses",
                            (d / "resp.jsonl").string(), "--out", (d / "o.jsonl").string()});
  EXPECT_EQ(invalid.code, 2);
}

void write_synth_inputs(const TempDir& d) {
  write_file(d / "seeds.txt", "Describe the sea.\nWrite about bread.\n写一首诗。\n");
  json templates{{"schema", "template_v1"}, {"templates", json::array()}};
  const auto all = testing::test_templates();
  templates["templates"].push_back(synthesis::to_json(all[0]));
  templates["templates"].push_back(synthesis::to_json(all[1]));
  write_file(d / "templates.json", templates.dump(2));
  write_file(d / "client.json",
             R"({"type":"mock","mock":{"seed":2,"pool":["Hi.","Hello. One. Two.","apple river apple words here."]}})");
}

TEST(CliSynth, WritesDatasetDeterministically) {
  TempDir d;
  write_synth_inputs(d);
  auto args = [&](const std::string& out) {
    return std::vector<std::string>{"synth", "--seeds", (d / "seeds.txt").string(), "--templates",
                                    (d / "templates.json").string(), "--client-config",
                                    (d / "client.json").string(), "--out-dir", (d / out).string(),
                                    "--templates-per-base", "2"};
  };
  const auto a = cli(args("a"));
  ASSERT_EQ(a.code, 0) << a.err;
  const auto b = cli(args("b"));
  ASSERT_EQ(b.code, 0) << b.err;
  for (const auto* f : {"pass.jsonl", "easy.jsonl", "hard.jsonl", "manifest.json"}) {
    EXPECT_EQ(read_file(d / "a" / f), read_file(d / "b" / f)) << f;
  }
  const auto m = json::parse(read_file(d / "a" / "manifest.json"));
  EXPECT_EQ(m["k"], 10);
  EXPECT_EQ(m["counts"]["prompts"], 6);
  EXPECT_TRUE(std::filesystem::exists(d / "a" / "run_manifest.json"));
  EXPECT_EQ(json::parse(a.out), m["counts"]);
}

TEST(CliSynth, UpstreamFailureEverywhereExitsThree) {
  TempDir d;
  write_synth_inputs(d);
  write_file(d / "client.json", R"({"type":"http","base_url":"http://127.0.0.1:1/v1","max_retries":0})");
  const auto r = cli({"synth", "--seeds", (d / "seeds.txt").string(), "--templates",
                      (d / "templates.json").string(), "--client-config", (d / "client.json").string(),
                      "--out-dir", (d / "o").string(), "--templates-per-base", "1"});
  EXPECT_EQ(r.code, 3) << r.err;
}

void write_samples_file(const std::filesystem::path& p) {
  synthesis::PromptRecord prompt;
  prompt.prompt_id = "p";
  prompt.base_instruction = "Greet.";
  prompt.spec = {"p", constraints::Language::kEn, {constraints::ConstraintItem::begin_match("Hi")}};
  prompt.rendered_prompt = synthesis::render_prompt(prompt.base_instruction, prompt.spec);
  std::vector<coldstart::CandidateSample> samples = {
      coldstart::make_sample("long", prompt, "<think>a b c d e f</think>Hi there."),
      coldstart::make_sample("short", prompt, "<think>a</think>Hi there."),
      coldstart::make_sample("wrong", prompt, "<think>a b c d e f</think>Hello."),
      coldstart::make_sample("mid", prompt, "<think>a b c d</think>Hi."),
  };
  std::ostringstream s;
  coldstart::write_samples(s, samples);
  write_file(p, s.str());
}

TEST(CliColdstart, FiltersAndAudits) {
  TempDir d;
  write_samples_file(d / "samples.jsonl");
  write_file(d / "judge.json", R"({"type":"mock","mock":{"pool":["Solid. Score:[[9]]"]}})");
  const auto r = cli({"coldstart", "--samples", (d / "samples.jsonl").string(), "--judge-config",
                      (d / "judge.json").string(), "--out", (d / "sel.jsonl").string(), "--min-tokens", "3",
                      "--judged", (d / "judged.jsonl").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto sel = coldstart::read_samples(d / "sel.jsonl");
  ASSERT_EQ(sel.size(), 2u);
  EXPECT_EQ(sel[0].sample_id, "long");
  EXPECT_EQ(sel[1].sample_id, "mid");
  const auto audit = jsonl_lines(d / "sel.audit.jsonl");
  ASSERT_EQ(audit.size(), 3u);
  EXPECT_EQ(audit[0]["schema"], "coldstart_audit_v1");
  EXPECT_EQ(audit[1]["sample_id"], "short");
  EXPECT_EQ(audit[1]["stage"], "thinking");
  EXPECT_EQ(audit[2]["stage"], "correctness");
  EXPECT_EQ(coldstart::read_samples(d / "judged.jsonl").size(), 4u);
  const auto m = json::parse(read_file(d / "sel.jsonl.manifest.json"));
  EXPECT_EQ(m["config"]["min_score"], 8);
  EXPECT_EQ(m["config"]["top_n"], 2000);
  EXPECT_EQ(m["counts"]["judge_calls"], 2);

  const auto bad = cli({"coldstart", "--samples", (d / "samples.jsonl").string(), "--judge-config",
                        (d / "judge.json").string(), "--out", (d / "x.jsonl").string(), "--min-score", "11"});
  EXPECT_EQ(bad.code, 2);
}

TEST(CliColdstart, JudgeDownEverywhereExitsThree) {
  TempDir d;
  write_samples_file(d / "samples.jsonl");
  write_file(d / "judge.json", R"({"type":"http","base_url":"http://127.0.0.1:1","max_retries":0})");
  const auto r = cli({"coldstart", "--samples", (d / "samples.jsonl").string(), "--judge-config",
                      (d / "judge.json").string(), "--out", (d / "sel.jsonl").string(), "--min-tokens", "1"});
  EXPECT_EQ(r.code, 3) << r.err;
}

void write_worked_records(const std::filesystem::path& p) {
  std::vector<signal::TokenRecord> records(3);
  const double nll[] = {2.0, 0.5, 1.0};
  const double h[] = {1.0, 0.5, 2.0};
  const double adv[] = {1.0, 1.0, -1.0};
  const char* text[] = {"x", "y", "x"};
  for (int i = 0; i < 3; ++i) {
    records[i].sample_id = "a";
    records[i].position = i;
    records[i].nll = nll[i];
    records[i].logp = -nll[i];
    records[i].entropy = h[i];
    records[i].advantage = adv[i];
    records[i].token_text = text[i];
  }
  std::ostringstream s;
  signal::write_token_records(s, records);
  write_file(p, s.str());
}

TEST(CliSignal, SelectThenLoss) {
  TempDir d;
  write_worked_records(d / "rec.jsonl");
  const auto sel = cli({"signal", "select", "--records", (d / "rec.jsonl").string(), "--r", "66.7", "--out",
                        (d / "sel.jsonl").string()});
  ASSERT_EQ(sel.code, 0) << sel.err;
  const auto header = jsonl_lines(d / "sel.jsonl")[0];
  EXPECT_EQ(header["schema"], "selection_v1");
  EXPECT_NEAR(header["threshold"].get<double>(), -0.1338, 1e-9);
  const auto loss = cli({"signal", "loss", "--records", (d / "rec.jsonl").string(), "--selection",
                         (d / "sel.jsonl").string()});
  ASSERT_EQ(loss.code, 0) << loss.err;
  const auto j = json::parse(loss.out);
  EXPECT_NEAR(j["loss"].get<double>(), 1.25, 1e-12);
  EXPECT_EQ(j["selected"], 2);
}

TEST(CliSignal, DefaultsAndParamsPrecedence) {
  TempDir d;
  write_worked_records(d / "rec.jsonl");
  const auto r = cli({"signal", "select", "--records", (d / "rec.jsonl").string(), "--out",
                      (d / "sel.jsonl").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto m = json::parse(read_file(d / "sel.jsonl.manifest.json"));
  EXPECT_EQ(m["config"]["r_percent"], 80.0);
  EXPECT_EQ(m["config"]["alpha"], 0.8);

  write_file(d / "params.json", R"({"r":50,"alpha":0.1})");
  const auto p = cli({"signal", "select", "--records", (d / "rec.jsonl").string(), "--out",
                      (d / "sel2.jsonl").string(), "--params", (d / "params.json").string(), "--alpha", "0.3"});
  ASSERT_EQ(p.code, 0) << p.err;
  m = json::parse(read_file(d / "sel2.jsonl.manifest.json"));
  EXPECT_EQ(m["config"]["r_percent"], 50.0);
  EXPECT_EQ(m["config"]["alpha"], 0.3);

  write_file(d / "bad.json", R"({"beta":1})");
  EXPECT_EQ(cli({"signal", "select", "--records", (d / "rec.jsonl").string(), "--out", (d / "x.jsonl").string(),
                 "--params", (d / "bad.json").string()})
                .code,
            2);
  EXPECT_EQ(cli({"signal", "select", "--records", (d / "rec.jsonl").string(), "--out", (d / "x.jsonl").string(),
                 "--reading", "sideways"})
                .code,
            2);
}

TEST(CliSignal, TeaAndReport) {
  TempDir d;
  write_worked_records(d / "rec.jsonl");
  const auto t = cli({"signal", "tea", "--records", (d / "rec.jsonl").string(), "--out", (d / "tea.jsonl").string(),
                      "--l-grpo", "1.0"});
  ASSERT_EQ(t.code, 0) << t.err;
  const auto lines = jsonl_lines(d / "tea.jsonl");
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0]["schema"], "tea_v1");
  EXPECT_EQ(lines[0]["tau"], 1.0);
  EXPECT_EQ(lines[0]["c"], 100.0);
  EXPECT_EQ(lines[0]["lambda"], 0.05);
  EXPECT_NEAR(lines[0]["objective"].get<double>(), 1.0 - 0.05 * lines[0]["l_tea"].get<double>(), 1e-12);
  double wsum = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) wsum += lines[i]["coefficient"].get<double>();
  EXPECT_NEAR(wsum, 1.0, 1e-12);

  const auto rep = cli({"signal", "report", "--records", (d / "rec.jsonl").string(), "--out",
                        (d / "rep.jsonl").string(), "--min-freq", "2"});
  ASSERT_EQ(rep.code, 0) << rep.err;
  const auto rows = jsonl_lines(d / "rep.jsonl");
  EXPECT_EQ(rows[0]["top_k"], 200);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1]["token_text"], "x");
  EXPECT_EQ(rows[1]["frequency"], 2);
}

TEST(CliSignal, RecordWithMismatchedLogpIsRejected) {
  TempDir d;
  write_file(d / "rec.jsonl",
             R"({"sample_id":"a","position":0,"token_id":1,"token_text":null,"nll":1.0,"entropy":0.5,"logp":-2.0,"advantage":null})"
             "\n");
  const auto r = cli({"signal", "select", "--records", (d / "rec.jsonl").string(), "--out", (d / "s.jsonl").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("InvalidRecord"), std::string::npos) << r.err;
}

TEST(CliReward, Cases) {
  const auto ok = cli({"reward", "--rc", "0.5", "--length", "500", "--lmax", "1000"});
  ASSERT_EQ(ok.code, 0) << ok.err;
  EXPECT_NEAR(json::parse(ok.out)["total"].get<double>(), 1.0, 1e-12);
  EXPECT_EQ(json::parse(cli({"reward", "--rc", "0.9", "--length", "1000", "--lmax", "1000"}).out)["r_l"], -2.0);
  EXPECT_EQ(cli({"reward", "--rc", "1.5", "--length", "1", "--lmax", "10"}).code, 2);
  EXPECT_EQ(cli({"reward", "--rc", "0.5", "--length", "1", "--lmax", "0"}).code, 2);
  EXPECT_EQ(cli({"reward", "--rc", "abc", "--length", "1", "--lmax", "10"}).code, 2);

  TempDir d;
  const auto with_manifest =
      cli({"reward", "--rc", "0.5", "--length", "1", "--lmax", "10", "--manifest", (d / "m.json").string()});
  ASSERT_EQ(with_manifest.code, 0);
  EXPECT_EQ(json::parse(read_file(d / "m.json"))["command"], "reward");
}

TEST(CliConfig, JsonConfigFileAndPrecedence) {
  TempDir d;
  write_file(d / "c.json", R"({"reward":{"lmax":10,"rc":0.5}})");
  const auto nested = cli({"--config", (d / "c.json").string(), "reward", "--length", "5"});
  ASSERT_EQ(nested.code, 0) << nested.err;
  EXPECT_NEAR(json::parse(nested.out)["r_l"].get<double>(), 0.5, 1e-12);

  write_file(d / "flat.json", R"({"lmax":10,"rc":0.5,"length":5})");
  const auto flat = cli({"--config", (d / "flat.json").string(), "reward", "--length", "0"});
  ASSERT_EQ(flat.code, 0) << flat.err;
  EXPECT_EQ(json::parse(flat.out)["r_l"], 0.0);

  write_file(d / "extra.json", R"({"reward":{"lmax":10,"bogus":1}})");
  EXPECT_EQ(cli({"--config", (d / "extra.json").string(), "reward", "--rc", "0.5", "--length", "1"}).code, 2);
  EXPECT_EQ(cli({"--config", (d / "missing.json").string(), "reward"}).code, 1);
}

TEST(CliGeneral, HelpVersionAndUsage) {
  EXPECT_EQ(cli({"--help"}).code, 0);
  EXPECT_EQ(cli({"--version"}).code, 0);
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"frobnicate"}).code, 2);
  EXPECT_EQ(cli({"verify"}).code, 2);
}

}  // namespace
}  // namespace ifrl::cli
