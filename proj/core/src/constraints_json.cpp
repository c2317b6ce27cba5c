#include <nlohmann/json.hpp>

#include "ifrl/constraints.hpp"
#include "ifrl/error.hpp"

namespace ifrl::constraints {
namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& what) { throw Error(ErrorCode::kSchema, what); }

std::optional<std::int64_t> opt_int(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_number_integer()) schema_error(std::string("'") + key + "' must be an integer");
  return it->get<std::int64_t>();
}

std::optional<std::string> opt_string(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) schema_error(std::string("'") + key + "' must be a string");
  return it->get<std::string>();
}

json measured_to_json(const MeasuredValue& v) {
  return std::visit([](auto x) { return json(x); }, v);
}

}  // namespace

json to_json(const ConstraintItem& item) {
  json j = json::object();
  j["kind"] = to_string(item.kind);
  if (item.keyword) j["keyword"] = *item.keyword;
  if (item.n_min) j["n_min"] = *item.n_min;
  if (item.n_max) j["n_max"] = *item.n_max;
  if (item.n_exact) j["n_exact"] = *item.n_exact;
  if (item.pattern) j["pattern"] = *item.pattern;
  if (!item.case_sensitive) j["case_sensitive"] = false;
  return j;
}

json to_json(const ConstraintSpec& spec) {
  json items = json::array();
  for (const auto& item : spec.items) items.push_back(to_json(item));
  return json{{"schema", kSpecSchema},
              {"spec_id", spec.spec_id},
              {"language", to_string(spec.language)},
              {"items", std::move(items)}};
}

json to_json(const VerificationReport& report) {
  json items = json::array();
  for (const auto& r : report.items) {
    items.push_back(json{{"item", to_json(r.item)},
                         {"measured", measured_to_json(r.measured)},
                         {"satisfied", r.satisfied}});
  }
  return json{{"all_satisfied", report.all_satisfied}, {"items", std::move(items)}};
}

json to_json(const RewardBreakdown& reward) {
  return json{{"per_item", reward.per_item},       {"bonus", reward.bonus},
              {"achieved_sum", reward.achieved_sum}, {"max_sum", reward.max_sum},
              {"r_c", reward.r_c}};
}

ConstraintItem item_from_json(const json& j) {
  if (!j.is_object()) schema_error("constraint item must be an object");
  const auto kind_name = opt_string(j, "kind");
  if (!kind_name) schema_error("constraint item is missing 'kind'");
  const auto kind = kind_from_string(*kind_name);
  if (!kind) schema_error("unknown constraint kind '" + *kind_name + "'");

  ConstraintItem item;
  item.kind = *kind;
  item.keyword = opt_string(j, "keyword");
  item.n_min = opt_int(j, "n_min");
  item.n_max = opt_int(j, "n_max");
  item.n_exact = opt_int(j, "n_exact");
  item.pattern = opt_string(j, "pattern");
  if (const auto it = j.find("case_sensitive"); it != j.end() && !it->is_null()) {
    if (!it->is_boolean()) schema_error("'case_sensitive' must be a boolean");
    item.case_sensitive = it->get<bool>();
  }
  validate(item);
  return item;
}

ConstraintSpec spec_from_json(const json& j) {
  if (!j.is_object()) schema_error("constraint spec must be an object");
  if (const auto schema = opt_string(j, "schema"); schema && *schema != kSpecSchema) {
    schema_error("unsupported spec schema '" + *schema + "'");
  }
  ConstraintSpec spec;
  const auto id = opt_string(j, "spec_id");
  if (!id) schema_error("spec is missing 'spec_id'");
  spec.spec_id = *id;

  const auto lang = opt_string(j, "language").value_or("en");
  const auto language = language_from_string(lang);
  if (!language) schema_error("unknown language '" + lang + "'");
  spec.language = *language;

  const auto items = j.find("items");
  if (items == j.end() || !items->is_array()) schema_error("spec is missing 'items' array");
  for (const auto& item : *items) spec.items.push_back(item_from_json(item));
  validate(spec);
  return spec;
}

}  // namespace ifrl::constraints
