#include <cstdlib>

#include "ifrl/digest.hpp"
#include "ifrl/error.hpp"
#include "ifrl/jsonl.hpp"
#include "ifrl/model_client.hpp"

namespace ifrl::client {
namespace {

using nlohmann::json;

std::uint64_t fnv1a(std::uint64_t h, std::string_view bytes) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::optional<std::string> env(const char* name) {
  if (const char* v = std::getenv(name); v != nullptr && *v != '\0') return std::string(v);
  return std::nullopt;
}

}  // namespace

void validate(const GenerationRequest& request) {
  if (request.n < 1) throw Error(ErrorCode::kInvalidArgument, "n must be >= 1");
  if (request.max_tokens < 1) throw Error(ErrorCode::kInvalidArgument, "max_tokens must be >= 1");
  if (!(request.temperature >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "temperature must be >= 0");
  }
}

ScriptedClient::ScriptedClient(Script script, json description)
    : script_(std::move(script)), description_(std::move(description)) {}

std::unique_ptr<ScriptedClient> ScriptedClient::from_list(std::vector<std::string> outputs) {
  json description{{"type", "scripted"}, {"outputs", outputs}};
  return std::make_unique<ScriptedClient>(
      [outputs = std::move(outputs)](const GenerationRequest&) { return outputs; },
      std::move(description));
}

GenerationResponse ScriptedClient::generate(const GenerationRequest& request) {
  validate(request);
  calls_.fetch_add(1);
  auto outputs = script_(request);
  if (outputs.size() < static_cast<std::size_t>(request.n)) {
    throw Error(ErrorCode::kMalformedResponse,
                "script produced " + std::to_string(outputs.size()) + " completions, " +
                    std::to_string(request.n) + " requested");
  }
  outputs.resize(static_cast<std::size_t>(request.n));
  GenerationResponse response;
  response.completions = std::move(outputs);
  response.usage.prompt_units = static_cast<std::int64_t>(request.prompt.size());
  for (const auto& c : response.completions) {
    response.usage.completion_units += static_cast<std::int64_t>(c.size());
  }
  return response;
}

std::unique_ptr<ScriptedClient> make_pool_mock(std::vector<std::string> pool, std::uint64_t seed) {
  if (pool.empty()) throw Error(ErrorCode::kInvalidArgument, "mock pool must not be empty");
  json description{{"type", "mock"}, {"seed", seed}, {"pool_digest", config_digest(pool)}};
  return std::make_unique<ScriptedClient>(
      [pool = std::move(pool), seed](const GenerationRequest& request) {
        std::vector<std::string> out;
        out.reserve(static_cast<std::size_t>(request.n));
        const std::uint64_t base = fnv1a(0xcbf29ce484222325ULL ^ mix64(seed), request.prompt);
        for (int i = 0; i < request.n; ++i) {
          const std::uint64_t h = mix64(base ^ mix64(static_cast<std::uint64_t>(i) + 1));
          out.push_back(pool[h % pool.size()]);
        }
        return out;
      },
      std::move(description));
}

ClientConfig client_config_from_json(const json& j, ClientConfig base) {
  if (!j.is_object()) throw Error(ErrorCode::kSchema, "client config must be a JSON object");
  try {
    base.type = j.value("type", base.type);
    base.base_url = j.value("base_url", base.base_url);
    base.api_key = j.value("api_key", base.api_key);
    base.model = j.value("model", base.model);
    base.retry.max_retries = j.value("max_retries", base.retry.max_retries);
    base.retry.initial_backoff =
        std::chrono::milliseconds(j.value("initial_backoff_ms", base.retry.initial_backoff.count()));
    base.retry.multiplier = j.value("backoff_multiplier", base.retry.multiplier);
    base.retry.max_backoff =
        std::chrono::milliseconds(j.value("max_backoff_ms", base.retry.max_backoff.count()));
    base.max_in_flight = j.value("max_in_flight", base.max_in_flight);
    base.timeout_seconds = j.value("timeout_seconds", base.timeout_seconds);
    if (j.contains("mock")) base.mock = j.at("mock");
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchema, std::string("bad client config: ") + e.what());
  }
  if (base.type != "http" && base.type != "mock") {
    throw Error(ErrorCode::kSchema, "client type must be 'http' or 'mock', got '" + base.type + "'");
  }
  if (base.max_in_flight < 1 || base.max_in_flight > 1024) {
    throw Error(ErrorCode::kSchema, "max_in_flight must lie in [1, 1024]");
  }
  if (base.retry.max_retries < 0) throw Error(ErrorCode::kSchema, "max_retries must be >= 0");
  return base;
}

ClientConfig load_client_config(const std::optional<std::filesystem::path>& file) {
  ClientConfig config;
  config.base_url = env("IFRL_BASE_URL").value_or("");
  config.api_key = env("IFRL_API_KEY").value_or("");
  config.model = env("IFRL_MODEL").value_or("");
  if (!file) return config;
  json j;
  try {
    j = json::parse(jsonl::read_text_file(*file));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kSchema, file->string() + ": " + e.what());
  }
  return client_config_from_json(j, std::move(config));
}

std::unique_ptr<GenerationClient> make_client(const ClientConfig& config) {
  if (config.type == "mock") {
    const auto& m = config.mock;
    if (!m.is_object() || !m.contains("pool") || !m["pool"].is_array()) {
      throw Error(ErrorCode::kSchema, "mock client config needs a 'pool' array");
    }
    std::vector<std::string> pool;
    for (const auto& p : m["pool"]) {
      if (!p.is_string()) throw Error(ErrorCode::kSchema, "mock pool entries must be strings");
      pool.push_back(p.get<std::string>());
    }
    return make_pool_mock(std::move(pool), m.value("seed", std::uint64_t{0}));
  }
  if (config.base_url.empty()) {
    throw Error(ErrorCode::kSchema, "http client needs base_url (config file or IFRL_BASE_URL)");
  }
  return std::make_unique<ChatCompletionsClient>(
      config, make_http_transport(config.base_url, config.timeout_seconds));
}

}  // namespace ifrl::client
