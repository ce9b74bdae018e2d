// Standalone mock chat-completions endpoint for offline runs of the CLI.
#include <CLI11.hpp>
#include <fmt/format.h>

#include <csignal>
#include <iostream>
#include <map>
#include <string>
#include <thread>

#include "simgpt/mock_server.hpp"
#include "simgpt/sts_eval.hpp"

namespace {

volatile std::sig_atomic_t stop_requested = 0;
void on_signal(int) { stop_requested = 1; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mock chat-completions server"};
  int port = 8089;
  std::string mode = "triplet";
  std::string task;
  int unparsable_every = 0;
  int fail_first = 0;
  app.add_option("--port", port, "Port on 127.0.0.1 (0 picks one)");
  app.add_option("--mode", mode, "triplet | icl")->check(CLI::IsMember({"triplet", "icl"}));
  app.add_option("--task", task, "STS TSV whose gold scores the icl mode echoes");
  app.add_option("--unparsable-every", unparsable_every, "Every k-th reply is prose");
  app.add_option("--fail-first", fail_first, "Answer the first n requests with HTTP 500");
  CLI11_PARSE(app, argc, argv);

  try {
    simgpt::mock::Handler inner = simgpt::mock::deterministic_triplet_reply;
    if (mode == "icl") {
      if (task.empty()) throw std::runtime_error("--task is required in icl mode");
      std::map<std::string, std::string> gold;
      for (const auto& p : simgpt::load_sts_task(task)) {
        gold[p.sentence_a + "\t" + p.sentence_b] = fmt::format("{}", p.gold);
      }
      inner = simgpt::mock::gold_echo_handler(std::move(gold));
    }
    auto handler = [=](const simgpt::mock::Request& r) -> simgpt::mock::Reply {
      if (r.index < static_cast<std::size_t>(fail_first)) return {500, "injected failure"};
      if (unparsable_every > 0 && (r.index + 1) % unparsable_every == 0) {
        return {200, "I would rather not answer that."};
      }
      return inner(r);
    };
    simgpt::mock::ChatServer server(handler, port);
    std::cout << server.url() << std::endl;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    while (!stop_requested) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    std::cerr << fmt::format("served {} request(s)\n", server.request_count());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
