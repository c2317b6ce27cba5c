#include "ifrl/token_records.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "ifrl/error.hpp"
#include "ifrl/jsonl.hpp"

namespace ifrl::signal {
namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 8> kRecordFields{
    "sample_id", "position", "token_id", "token_text", "nll", "entropy", "logp", "advantage"};

[[noreturn]] void schema_error(const std::string& what) { throw Error(ErrorCode::kSchema, what); }

double number_field(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) schema_error(std::string("missing field '") + key + "'");
  if (!it->is_number()) schema_error(std::string("field '") + key + "' must be a number");
  return it->get<double>();
}

std::int64_t int_field(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) schema_error(std::string("missing field '") + key + "'");
  if (!it->is_number_integer()) schema_error(std::string("field '") + key + "' must be an integer");
  return it->get<std::int64_t>();
}

std::string string_field(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) schema_error(std::string("missing field '") + key + "'");
  if (!it->is_string()) schema_error(std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

}  // namespace

json to_json(const TokenRecord& r) {
  return json{{"sample_id", r.sample_id},
              {"position", r.position},
              {"token_id", r.token_id},
              {"token_text", r.token_text ? json(*r.token_text) : json(nullptr)},
              {"nll", r.nll},
              {"entropy", r.entropy},
              {"logp", r.logp},
              {"advantage", r.advantage ? json(*r.advantage) : json(nullptr)}};
}

TokenRecord record_from_json(const json& j) {
  if (!j.is_object()) schema_error("token record must be an object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(kRecordFields.begin(), kRecordFields.end(), key) == kRecordFields.end()) {
      schema_error("unexpected field '" + key + "' in token record");
    }
  }
  TokenRecord r;
  r.sample_id = string_field(j, "sample_id");
  r.position = int_field(j, "position");
  r.token_id = int_field(j, "token_id");
  if (const auto it = j.find("token_text"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) schema_error("field 'token_text' must be a string or null");
    r.token_text = it->get<std::string>();
  }
  r.nll = number_field(j, "nll");
  r.entropy = number_field(j, "entropy");
  r.logp = number_field(j, "logp");
  if (const auto it = j.find("advantage"); it != j.end() && !it->is_null()) {
    if (!it->is_number()) schema_error("field 'advantage' must be a number or null");
    r.advantage = it->get<double>();
  }
  validate(r);
  return r;
}

std::vector<TokenRecord> read_token_records(std::istream& in, std::string_view source) {
  const auto doc = jsonl::read(in, source);
  jsonl::expect_schema(doc, kTokenRecordSchema, source);
  std::vector<TokenRecord> out;
  out.reserve(doc.records.size());
  for (const auto& line : doc.records) {
    out.push_back(jsonl::at_line(source, line, [](const json& j) { return record_from_json(j); }));
  }
  return out;
}

std::vector<TokenRecord> read_token_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return read_token_records(in, path.string());
}

void write_token_records(std::ostream& out, std::span<const TokenRecord> records) {
  jsonl::write_line(out, jsonl::make_header(kTokenRecordSchema));
  for (const auto& r : records) jsonl::write_line(out, to_json(r));
}

void write_selection(std::ostream& out, const SelectionResult& selection, const json& extra_header) {
  json header = jsonl::make_header(kSelectionSchema);
  header["threshold"] = selection.threshold;
  header["r_percent"] = selection.r_percent;
  header["alpha"] = selection.alpha;
  header["selected"] = selection.selected.size();
  header["selected_fraction"] = selection.selected_fraction;
  header["tie_admitted"] = selection.tie_admitted;
  if (extra_header.is_object()) header.update(extra_header);
  jsonl::write_line(out, header);
  for (const auto& key : selection.selected) {
    jsonl::write_line(out, json{{"sample_id", key.sample_id}, {"position", key.position}});
  }
}

SelectionResult read_selection(std::istream& in, std::string_view source) {
  const auto doc = jsonl::read(in, source);
  if (!doc.header) {
    throw Error(ErrorCode::kSchema, std::string(source) + ": selection file has no header line");
  }
  jsonl::expect_schema(doc, kSelectionSchema, source);
  SelectionResult out;
  const auto& h = *doc.header;
  try {
    out.threshold = h.at("threshold").get<double>();
    out.r_percent = h.at("r_percent").get<double>();
    out.alpha = h.at("alpha").get<double>();
    out.selected_fraction = h.value("selected_fraction", 0.0);
    out.tie_admitted = h.value("tie_admitted", std::size_t{0});
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchema, std::string(source) + ": bad selection header: " + e.what());
  }
  for (const auto& line : doc.records) {
    out.selected.push_back(jsonl::at_line(source, line, [](const json& j) {
      return TokenKey{string_field(j, "sample_id"), int_field(j, "position")};
    }));
  }
  std::sort(out.selected.begin(), out.selected.end());
  return out;
}

SelectionResult read_selection(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return read_selection(in, path.string());
}

}  // namespace ifrl::signal
