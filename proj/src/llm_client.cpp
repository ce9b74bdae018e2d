#include <fmt/format.h>
#include <httplib.h>

#include <chrono>
#include <cstdlib>
#include <thread>

#include "json.hpp"
#include "simgpt/annotation.hpp"
#include "simgpt/error.hpp"

namespace simgpt {

void LLMConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::config, "llm: " + what); };
  if (!(temperature >= 0.0)) fail("temperature must be >= 0");
  if (!(top_p > 0.0 && top_p <= 1.0)) fail("top_p must be in (0, 1]");
  if (max_tokens <= 0) fail("max_tokens must be > 0");
  if (max_in_flight < 1) fail("max_in_flight must be >= 1");
  if (max_retries < 0) fail("max_retries must be >= 0");
  if (backoff_initial_ms < 0) fail("backoff_initial_ms must be >= 0");
  if (request_timeout_s <= 0) fail("request_timeout_s must be > 0");
  if (endpoint_url.find("://") == std::string::npos) fail("endpoint_url must include a scheme");
}

namespace {

std::optional<std::string> api_key_from_env() {
  if (const char* key = std::getenv(kApiKeyEnv); key != nullptr && *key != '\0') {
    return std::string(key);
  }
  return std::nullopt;
}

bool is_transient(int status) { return status == 429 || status >= 500; }

}  // namespace

ChatClient::ChatClient(LLMConfig config) : ChatClient(std::move(config), api_key_from_env()) {}

ChatClient::ChatClient(LLMConfig config, std::optional<std::string> api_key)
    : config_(std::move(config)), api_key_(std::move(api_key)) {
  config_.validate();
  const auto scheme_end = config_.endpoint_url.find("://");
  const auto path_start = config_.endpoint_url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    base_url_ = config_.endpoint_url;
    path_ = "/v1/chat/completions";
  } else {
    base_url_ = config_.endpoint_url.substr(0, path_start);
    path_ = config_.endpoint_url.substr(path_start);
  }
}

std::string ChatClient::complete(std::string_view prompt) {
  nlohmann::json body = {
      {"model", config_.model_name},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", std::string(prompt)}}})},
      {"temperature", config_.temperature},
      {"top_p", config_.top_p},
      {"frequency_penalty", config_.frequency_penalty},
      {"presence_penalty", config_.presence_penalty},
      {"max_tokens", config_.max_tokens},
  };
  const std::string payload = body.dump();

  httplib::Client client(base_url_);
  client.set_connection_timeout(std::chrono::seconds(config_.request_timeout_s));
  client.set_read_timeout(std::chrono::seconds(config_.request_timeout_s));
  client.set_write_timeout(std::chrono::seconds(config_.request_timeout_s));
  httplib::Headers headers;
  if (api_key_) headers.emplace("Authorization", "Bearer " + *api_key_);

  int last_status = -1;
  std::string last_detail;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0 && config_.backoff_initial_ms > 0) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(static_cast<long long>(config_.backoff_initial_ms) << (attempt - 1)));
    }
    ++requests_;
    auto res = client.Post(path_, headers, payload, "application/json");
    if (!res) {
      last_status = -1;
      last_detail = httplib::to_string(res.error());
      continue;
    }
    last_status = res->status;
    if (res->status == 200) {
      try {
        const auto reply = nlohmann::json::parse(res->body);
        return reply.at("choices").at(0).at("message").at("content").get<std::string>();
      } catch (const nlohmann::json::exception& e) {
        throw TransportError(200, fmt::format("malformed completion response: {}", e.what()));
      }
    }
    if (res->status == 401 || res->status == 403) {
      throw Error(ErrorCode::auth,
                  fmt::format("authentication failed (HTTP {}); check {}", res->status, kApiKeyEnv));
    }
    last_detail = res->body.substr(0, 200);
    if (!is_transient(res->status)) {
      throw TransportError(res->status, fmt::format("HTTP {}: {}", res->status, last_detail));
    }
  }
  throw TransportError(last_status, fmt::format("giving up after {} attempt(s), last status {}: {}",
                                                config_.max_retries + 1, last_status, last_detail));
}

std::string complete(std::string_view prompt, const LLMConfig& config) {
  ChatClient client(config);
  return client.complete(prompt);
}

}  // namespace simgpt
