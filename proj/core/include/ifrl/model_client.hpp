#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

// Text-generation clients used for pass-ratio sampling and LLM judging: an
// OpenAI-compatible chat-completions client and deterministic mocks.
namespace ifrl::client {

struct GenerationRequest {
  std::string prompt;
  int n = 1;
  int max_tokens = 1024;
  double temperature = 1.0;
  std::optional<std::int64_t> seed;
};

void validate(const GenerationRequest& request);

struct Usage {
  std::int64_t prompt_units = 0;
  std::int64_t completion_units = 0;
};

struct GenerationResponse {
  std::vector<std::string> completions;  // exactly request.n entries
  Usage usage;
  double latency_ms = 0.0;
  int retries = 0;
};

class GenerationClient {
 public:
  virtual ~GenerationClient() = default;

  // Thread-safe. Errors: kTransport, kAuth, kRateLimited, kMalformedResponse,
  // kClientError (non-retryable upstream rejection).
  virtual GenerationResponse generate(const GenerationRequest& request) = 0;

  // Client configuration without credentials; feeds run-manifest digests.
  virtual nlohmann::json describe() const = 0;
};

// ---- mocks -----------------------------------------------------------------

// A script maps a request to its completions and must be a pure function.
using Script = std::function<std::vector<std::string>(const GenerationRequest&)>;

class ScriptedClient final : public GenerationClient {
 public:
  explicit ScriptedClient(Script script, nlohmann::json description = {{"type", "scripted"}});

  // Always answers with the first n entries of `outputs`.
  static std::unique_ptr<ScriptedClient> from_list(std::vector<std::string> outputs);

  // Raises kMalformedResponse when the script yields fewer than n completions.
  GenerationResponse generate(const GenerationRequest& request) override;
  nlohmann::json describe() const override { return description_; }

  std::size_t calls() const noexcept { return calls_.load(); }

 private:
  Script script_;
  nlohmann::json description_;
  std::atomic<std::size_t> calls_{0};
};

// Completion i of a request is pool[h(seed, prompt, i) % pool.size()] with a
// stable 64-bit hash, so outcomes vary per prompt but never between runs.
std::unique_ptr<ScriptedClient> make_pool_mock(std::vector<std::string> pool, std::uint64_t seed);

// ---- HTTP ------------------------------------------------------------------

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{500};
  double multiplier = 2.0;
  std::chrono::milliseconds max_backoff{30'000};
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

struct HttpResult {
  int status = 0;
  std::string body;
  std::map<std::string, std::string> headers;  // lower-cased names
};

class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  // Throws Error{kTransport} when no HTTP response was obtained.
  virtual HttpResult post_json(const std::string& path, const std::string& body,
                               const std::map<std::string, std::string>& headers) = 0;
};

struct ClientConfig {
  std::string type = "http";  // "http" or "mock"
  std::string base_url;       // e.g. https://api.example.com/v1
  std::string api_key;
  std::string model;
  RetryPolicy retry;
  int max_in_flight = 4;
  int timeout_seconds = 120;
  nlohmann::json mock = nlohmann::json::object();  // {"pool": [...], "seed": n} for type "mock"
};

// Starts from IFRL_BASE_URL / IFRL_API_KEY / IFRL_MODEL, then applies the JSON
// file (if any), whose keys override the environment.
ClientConfig load_client_config(const std::optional<std::filesystem::path>& file);
ClientConfig client_config_from_json(const nlohmann::json& j, ClientConfig base = {});

std::unique_ptr<HttpTransport> make_http_transport(const std::string& base_url, int timeout_seconds);

class ChatCompletionsClient final : public GenerationClient {
 public:
  ChatCompletionsClient(ClientConfig config, std::unique_ptr<HttpTransport> transport,
                        Sleeper sleeper = {});

  GenerationResponse generate(const GenerationRequest& request) override;
  nlohmann::json describe() const override;

  // Request body: model, messages[{role: user, content}], n, max_tokens,
  // temperature and optional seed.
  static nlohmann::json request_body(const ClientConfig& config, const GenerationRequest& request);
  // Reads choices[].message.content (ordered by index) and usage.
  static GenerationResponse parse_response(const std::string& body, int expected_n);

 private:
  ClientConfig config_;
  std::unique_ptr<HttpTransport> transport_;
  Sleeper sleeper_;
  std::counting_semaphore<1024> in_flight_;
};

std::unique_ptr<GenerationClient> make_client(const ClientConfig& config);

}  // namespace ifrl::client
