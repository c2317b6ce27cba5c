#include <httplib.h>

#include <algorithm>
#include <cctype>
#include <regex>
#include <thread>

#include "ifrl/error.hpp"
#include "ifrl/model_client.hpp"

namespace ifrl::client {
namespace {

using nlohmann::json;

class HttplibTransport final : public HttpTransport {
 public:
  HttplibTransport(std::string scheme_host_port, std::string prefix, int timeout_seconds)
      : scheme_host_port_(std::move(scheme_host_port)),
        prefix_(std::move(prefix)),
        timeout_seconds_(timeout_seconds) {}

  HttpResult post_json(const std::string& path, const std::string& body,
                       const std::map<std::string, std::string>& headers) override {
    // httplib::Client is not safe for concurrent requests; one per call.
    httplib::Client cli(scheme_host_port_);
    cli.set_connection_timeout(timeout_seconds_, 0);
    cli.set_read_timeout(timeout_seconds_, 0);
    cli.set_write_timeout(timeout_seconds_, 0);
    httplib::Headers h(headers.begin(), headers.end());
    auto res = cli.Post(prefix_ + path, h, body, "application/json");
    if (!res) {
      throw Error(ErrorCode::kTransport, "POST " + scheme_host_port_ + prefix_ + path + " failed: " +
                                             httplib::to_string(res.error()));
    }
    HttpResult out;
    out.status = res->status;
    out.body = res->body;
    for (const auto& [k, v] : res->headers) {
      std::string key = k;
      std::transform(key.begin(), key.end(), key.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      out.headers.emplace(std::move(key), v);
    }
    return out;
  }

 private:
  std::string scheme_host_port_;
  std::string prefix_;
  int timeout_seconds_;
};

class SemaphoreGuard {
 public:
  explicit SemaphoreGuard(std::counting_semaphore<1024>& s) : s_(s) { s_.acquire(); }
  ~SemaphoreGuard() { s_.release(); }
  SemaphoreGuard(const SemaphoreGuard&) = delete;
  SemaphoreGuard& operator=(const SemaphoreGuard&) = delete;

 private:
  std::counting_semaphore<1024>& s_;
};

std::string snippet(const std::string& body) {
  return body.size() <= 200 ? body : body.substr(0, 200) + "...";
}

}  // namespace

std::unique_ptr<HttpTransport> make_http_transport(const std::string& base_url, int timeout_seconds) {
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(base_url, m, kUrl)) {
    throw Error(ErrorCode::kSchema, "base_url must look like http(s)://host[:port][/prefix], got '" +
                                        base_url + "'");
  }
  std::string prefix = m[2].matched ? m[2].str() : std::string();
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return std::make_unique<HttplibTransport>(m[1].str(), std::move(prefix), timeout_seconds);
}

ChatCompletionsClient::ChatCompletionsClient(ClientConfig config,
                                             std::unique_ptr<HttpTransport> transport,
                                             Sleeper sleeper)
    : config_(std::move(config)),
      transport_(std::move(transport)),
      sleeper_(sleeper ? std::move(sleeper)
                       : Sleeper([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); })),
      in_flight_(std::clamp(config_.max_in_flight, 1, 1024)) {}

json ChatCompletionsClient::request_body(const ClientConfig& config, const GenerationRequest& request) {
  json body{{"model", config.model},
            {"messages", json::array({json{{"role", "user"}, {"content", request.prompt}}})},
            {"n", request.n},
            {"max_tokens", request.max_tokens},
            {"temperature", request.temperature}};
  if (request.seed) body["seed"] = *request.seed;
  return body;
}

GenerationResponse ChatCompletionsClient::parse_response(const std::string& body, int expected_n) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error&) {
    throw Error(ErrorCode::kMalformedResponse, "response is not JSON: " + snippet(body));
  }
  const auto choices = j.find("choices");
  if (choices == j.end() || !choices->is_array()) {
    throw Error(ErrorCode::kMalformedResponse, "response has no 'choices' array");
  }
  std::vector<std::pair<std::int64_t, std::string>> indexed;
  std::int64_t position = 0;
  for (const auto& choice : *choices) {
    const auto content = choice.is_object() && choice.contains("message") && choice["message"].is_object()
                             ? choice["message"].value("content", json())
                             : json();
    if (!content.is_string()) {
      throw Error(ErrorCode::kMalformedResponse, "choice without string message.content");
    }
    const auto index = choice.value("index", position);
    indexed.emplace_back(index, content.get<std::string>());
    ++position;
  }
  if (indexed.size() < static_cast<std::size_t>(expected_n)) {
    throw Error(ErrorCode::kMalformedResponse, "expected " + std::to_string(expected_n) +
                                                   " choices, got " + std::to_string(indexed.size()));
  }
  std::stable_sort(indexed.begin(), indexed.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  GenerationResponse out;
  for (std::size_t i = 0; i < static_cast<std::size_t>(expected_n); ++i) {
    out.completions.push_back(std::move(indexed[i].second));
  }
  if (const auto usage = j.find("usage"); usage != j.end() && usage->is_object()) {
    out.usage.prompt_units = usage->value("prompt_tokens", std::int64_t{0});
    out.usage.completion_units = usage->value("completion_tokens", std::int64_t{0});
  }
  return out;
}

GenerationResponse ChatCompletionsClient::generate(const GenerationRequest& request) {
  validate(request);
  // Serialised once; every attempt sends identical bytes.
  const std::string body = request_body(config_, request).dump();
  std::map<std::string, std::string> headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

  SemaphoreGuard slot(in_flight_);
  const auto start = std::chrono::steady_clock::now();
  auto backoff = config_.retry.initial_backoff;
  int retries = 0;
  for (;;) {
    std::optional<Error> failure;
    auto wait = backoff;
    try {
      const auto res = transport_->post_json("/chat/completions", body, headers);
      if (res.status >= 200 && res.status < 300) {
        auto out = parse_response(res.body, request.n);
        out.retries = retries;
        out.latency_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - start).count();
        return out;
      }
      const std::string what = "HTTP " + std::to_string(res.status) + ": " + snippet(res.body);
      if (res.status == 401 || res.status == 403) throw Error(ErrorCode::kAuth, what);
      if (res.status == 429) {
        failure.emplace(ErrorCode::kRateLimited, what);
        if (const auto it = res.headers.find("retry-after"); it != res.headers.end()) {
          try {
            wait = std::chrono::milliseconds(static_cast<std::int64_t>(std::stod(it->second) * 1000.0));
          } catch (const std::exception&) {
            // HTTP-date form; fall back to the backoff schedule.
          }
        }
      } else if (res.status == 408 || res.status >= 500) {
        failure.emplace(ErrorCode::kTransport, what);
      } else {
        throw Error(ErrorCode::kClientError, what);
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kTransport) throw;
      failure = e;
    }
    if (retries >= config_.retry.max_retries) throw *failure;
    sleeper_(wait);
    ++retries;
    backoff = std::min(std::chrono::milliseconds(static_cast<std::int64_t>(
                           static_cast<double>(backoff.count()) * config_.retry.multiplier)),
                       config_.retry.max_backoff);
  }
}

json ChatCompletionsClient::describe() const {
  return json{{"type", "http"},
              {"base_url", config_.base_url},
              {"model", config_.model},
              {"max_retries", config_.retry.max_retries},
              {"max_in_flight", config_.max_in_flight}};
}

}  // namespace ifrl::client
