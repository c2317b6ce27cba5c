#include "json_config.hpp"

#include <algorithm>
#include <istream>
#include <iterator>

#include <nlohmann/json.hpp>

namespace ifrl::cli {
namespace {

using nlohmann::json;

std::string flag_name(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

std::string scalar(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return v.dump();
}

std::vector<std::string> selected_path(const CLI::App* app) {
  std::vector<std::string> path;
  for (auto subs = app->get_subcommands(); !subs.empty(); subs = subs.front()->get_subcommands()) {
    path.push_back(subs.front()->get_name());
  }
  return path;
}

const CLI::App* find_sub(const CLI::App* app, const std::string& name) {
  for (const auto* sub : app->get_subcommands([](const CLI::App*) { return true; })) {
    if (sub->get_name() == name) return sub;
  }
  return nullptr;
}

void collect(const json& obj, const CLI::App* app, std::vector<std::string> parents,
             std::vector<CLI::ConfigItem>& out) {
  for (const auto& [key, value] : obj.items()) {
    if (value.is_object()) {
      const auto* sub = app ? find_sub(app, key) : nullptr;
      if (sub == nullptr) {
        throw CLI::ConversionError("config key '" + key + "' is not a subcommand");
      }
      auto nested = parents;
      nested.push_back(key);
      collect(value, sub, std::move(nested), out);
      continue;
    }
    CLI::ConfigItem item;
    item.parents = parents;
    item.name = flag_name(key);
    if (value.is_array()) {
      for (const auto& v : value) item.inputs.push_back(scalar(v));
    } else if (!value.is_null()) {
      item.inputs.push_back(scalar(value));
    } else {
      continue;
    }
    out.push_back(std::move(item));
  }
}

}  // namespace

std::string JsonConfig::to_config(const CLI::App* app, bool default_also, bool, std::string) const {
  json j = json::object();
  for (const auto* opt : app->get_options()) {
    if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
    const auto& name = opt->get_lnames().front();
    if (opt->count() > 0) {
      const auto& results = opt->results();
      j[name] = results.size() == 1 ? json(results.front()) : json(results);
    } else if (default_also && !opt->get_default_str().empty()) {
      j[name] = opt->get_default_str();
    }
  }
  return j.dump(2) + "\n";
}

std::vector<CLI::ConfigItem> JsonConfig::from_config(std::istream& input) const {
  json j;
  try {
    j = json::parse(std::string(std::istreambuf_iterator<char>(input), {}));
  } catch (const json::parse_error& e) {
    throw CLI::ConversionError(std::string("config file is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw CLI::ConversionError("config file must hold a JSON object");

  // Scalars at the top level target the subcommand actually selected.
  std::vector<std::string> parents = selected_path(root_);
  const CLI::App* target = root_;
  for (const auto& p : parents) target = find_sub(target, p);

  std::vector<CLI::ConfigItem> out;
  json scalars = json::object();
  json nested = json::object();
  for (const auto& [key, value] : j.items()) {
    (value.is_object() ? nested : scalars)[key] = value;
  }
  collect(scalars, target, parents, out);
  collect(nested, root_, {}, out);
  return out;
}

}  // namespace ifrl::cli
