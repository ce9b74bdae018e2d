#include "doctest.h"

#include "simgpt/config.hpp"
#include "simgpt/error.hpp"
#include "test_util.hpp"

using namespace simgpt;

TEST_CASE("defaults") {
  const auto c = default_pipeline_config();
  CHECK(c.llm.model_name == "gpt-4");
  CHECK(c.llm.temperature == 0.0);
  CHECK(c.llm.top_p == 1.0);
  CHECK(c.llm.frequency_penalty == 0.0);
  CHECK(c.llm.presence_penalty == 0.0);
  CHECK(c.llm.max_tokens == 4096);
  CHECK(c.loss.alpha == 1.0);
  CHECK(c.loss.batch_size == 512);
  CHECK(c.train.learning_rate == 5e-5);
  CHECK_FALSE(c.train.epochs.has_value());
  CHECK(c.sources_enabled.size() == 3);
  CHECK(c.nli_enabled);
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("config round-trips through its serialized form") {
  auto c = default_pipeline_config();
  CHECK(parse_config(serialize_config(c)) == c);

  c.llm.model_name = "local-model";
  c.llm.endpoint_url = "http://127.0.0.1:9/v1/chat/completions";
  c.llm.max_in_flight = 4;
  c.loss.tau = 0.07;
  c.loss.lambda_m = 0.5;
  c.loss.margin = 0.1;
  c.loss.hard_negative = HardNegative::argmax;
  c.train.epochs = 3;
  c.train.learning_rate = 0.1 + 0.2;
  c.train.seed = 18446744073709551615ull;
  c.train.use_margin_loss = true;
  c.train.dim = 24;
  c.paths["caption"] = "data/caption \"quoted\".txt";
  c.sources_enabled = {Genre::caption, Genre::multigenre};
  c.nli_enabled = false;
  c.eval_tasks = {{"STS-B", "sts/stsb.tsv"}, {"custom", "x.tsv"}};
  c.sample_sizes = {{"caption", 100}};
  c.few_shot_variant = "caption16";
  c.few_shot_file = "shots.jsonl";
  c.icl_shots = 32;
  const auto text = serialize_config(c);
  CHECK(parse_config(text) == c);
  CHECK(serialize_config(parse_config(text)) == text);
}

TEST_CASE("partial configs fill in defaults") {
  const auto c = parse_config(R"({"train": {"epochs": 2}, "sources_enabled": ["questions", "caption"]})");
  CHECK(*c.train.epochs == 2);
  CHECK(c.sources_enabled == std::vector<Genre>{Genre::caption, Genre::question});
  CHECK(c.loss == LossConfig{});
  CHECK(c.train.to_train_config().epochs == 2);
}

TEST_CASE("invalid configs are rejected") {
  auto code_of = [](std::string_view text) {
    try {
      parse_config(text);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::io;  // sentinel: nothing thrown
  };
  CHECK(code_of("{") == ErrorCode::config);
  CHECK(code_of(R"({"unknown": 1})") == ErrorCode::config);
  CHECK(code_of(R"({"loss": {"tua": 0.1}})") == ErrorCode::config);
  CHECK(code_of(R"({"loss": {"tau": 0}})") == ErrorCode::config);
  CHECK(code_of(R"({"loss": {"hard_negative": "median"}})") == ErrorCode::config);
  CHECK(code_of(R"({"llm": {"top_p": 0}})") == ErrorCode::config);
  CHECK(code_of(R"({"train": {"epochs": 0}})") == ErrorCode::config);
  CHECK(code_of(R"({"train": {"epochs": "two"}})") == ErrorCode::config);
  CHECK(code_of(R"({"icl_shots": 12})") == ErrorCode::config);
  CHECK(code_of(R"({"few_shot_variant": "caption12"})") == ErrorCode::config);
  CHECK(code_of(R"({"sources_enabled": []})") == ErrorCode::config);
  CHECK(code_of(R"({"sample_sizes": {"poems": 3}})") == ErrorCode::config);
}

TEST_CASE("epochs are required to train") {
  const auto c = default_pipeline_config();
  try {
    c.train.to_train_config();
    FAIL("expected config error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::config);
    CHECK(std::string(e.what()).find("epochs") != std::string::npos);
  }
}

TEST_CASE("paths resolve against the config file directory") {
  testutil::TempDir dir;
  testutil::write(dir / "sub" / "cfg.json", R"({"paths": {"caption": "c.txt", "nli": "/abs/nli.tsv"}})");
  const auto c = load_config(dir / "sub" / "cfg.json");
  CHECK(c.path("caption") == dir / "sub" / "c.txt");
  CHECK(c.path("nli") == "/abs/nli.tsv");
  CHECK_THROWS_AS(c.path("question"), Error);
  CHECK_THROWS_AS(load_config(dir / "missing.json"), Error);
}

TEST_CASE("source lists") {
  CHECK(parse_source_list("multigenre, caption") == std::vector<Genre>{Genre::caption, Genre::multigenre});
  CHECK(parse_source_list("caption,caption") == std::vector<Genre>{Genre::caption});
  CHECK_THROWS_AS(parse_source_list(""), Error);
  CHECK_THROWS_AS(parse_source_list("caption,poems"), Error);
}
