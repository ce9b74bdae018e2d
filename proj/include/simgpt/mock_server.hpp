#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

namespace simgpt::mock {

struct Request {
  std::size_t index = 0;  // 0-based arrival order
  std::string prompt;     // content of the user message
  std::string body;
  std::string authorization;
};

struct Reply {
  int status = 200;
  std::string content;  // completion text, or error body when status != 200
};

using Handler = std::function<Reply(const Request&)>;

// In-process chat-completions server on 127.0.0.1. Port 0 picks an ephemeral
// port.
class ChatServer {
 public:
  explicit ChatServer(Handler handler, int port = 0);
  ~ChatServer();
  ChatServer(const ChatServer&) = delete;
  ChatServer& operator=(const ChatServer&) = delete;

  // Full chat-completions URL, usable as LLMConfig::endpoint_url.
  std::string url() const;
  int port() const { return port_; }
  std::size_t request_count() const { return count_.load(); }
  std::vector<Request> requests() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  Handler handler_;
  int port_ = 0;
  std::atomic<std::size_t> count_{0};
  mutable std::mutex mu_;
  std::vector<Request> log_;
  std::thread thread_;
};

// Text after the last "Input: " marker up to the following "\nOutput: ".
std::string last_input(std::string_view prompt);

// The query pair of an in-context prompt.
std::pair<std::string, std::string> last_pair(std::string_view prompt);

// Well-formed, input-dependent triplet completion.
Reply deterministic_triplet_reply(const Request& request);

// Answers each query pair with the gold score from `gold` (keyed by
// sentence_a + '\t' + sentence_b); unknown pairs get "I cannot judge.".
Handler gold_echo_handler(std::map<std::string, std::string> gold);

}  // namespace simgpt::mock
