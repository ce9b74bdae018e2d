#include "simgpt/mock_server.hpp"

#include <httplib.h>

#include <stdexcept>

#include "json.hpp"

namespace simgpt::mock {

struct ChatServer::Impl {
  httplib::Server server;
};

ChatServer::ChatServer(Handler handler, int port) : impl_(std::make_unique<Impl>()), handler_(std::move(handler)) {
  impl_->server.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
    Request request;
    request.index = count_.fetch_add(1);
    request.body = req.body;
    request.authorization = req.get_header_value("Authorization");
    try {
      const auto body = nlohmann::json::parse(req.body);
      request.prompt = body.at("messages").at(0).at("content").get<std::string>();
    } catch (const nlohmann::json::exception&) {
      res.status = 400;
      res.set_content(R"({"error":"bad request"})", "application/json");
      return;
    }
    {
      std::lock_guard lock(mu_);
      log_.push_back(request);
    }
    const Reply reply = handler_(request);
    res.status = reply.status;
    if (reply.status != 200) {
      res.set_content(nlohmann::json{{"error", {{"message", reply.content}}}}.dump(), "application/json");
      return;
    }
    nlohmann::json out = {
        {"id", "mock-" + std::to_string(request.index)},
        {"object", "chat.completion"},
        {"choices", nlohmann::json::array({{{"index", 0},
                                            {"message", {{"role", "assistant"}, {"content", reply.content}}},
                                            {"finish_reason", "stop"}}})},
    };
    res.set_content(out.dump(), "application/json");
  });
  if (port == 0) {
    port_ = impl_->server.bind_to_any_port("127.0.0.1");
  } else {
    port_ = impl_->server.bind_to_port("127.0.0.1", port) ? port : -1;
  }
  if (port_ <= 0) throw std::runtime_error("mock server: cannot bind a local port");
  thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

ChatServer::~ChatServer() {
  impl_->server.stop();
  if (thread_.joinable()) thread_.join();
}

std::string ChatServer::url() const {
  return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
}

std::vector<Request> ChatServer::requests() const {
  std::lock_guard lock(mu_);
  return log_;
}

std::string last_input(std::string_view prompt) {
  const auto at = prompt.rfind("Input: ");
  if (at == std::string_view::npos) return {};
  auto rest = prompt.substr(at + 7);
  const auto end = rest.find("\nOutput: ");
  return std::string(rest.substr(0, end));
}

std::pair<std::string, std::string> last_pair(std::string_view prompt) {
  const std::string both = last_input(prompt);
  const auto nl = both.find('\n');
  if (nl == std::string::npos) return {both, {}};
  return {both.substr(0, nl), both.substr(nl + 1)};
}

Reply deterministic_triplet_reply(const Request& request) {
  const std::string input = last_input(request.prompt);
  return {200, "1. Put differently: " + input + "\n2. Quite unlike this: " + input};
}

Handler gold_echo_handler(std::map<std::string, std::string> gold) {
  return [gold = std::move(gold)](const Request& request) {
    const auto [a, b] = last_pair(request.prompt);
    auto it = gold.find(a + '\t' + b);
    if (it == gold.end()) return Reply{200, "I cannot judge."};
    return Reply{200, it->second};
  };
}

}  // namespace simgpt::mock
