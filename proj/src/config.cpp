#include "simgpt/config.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <set>

#include "json.hpp"
#include "simgpt/error.hpp"
#include "simgpt/text.hpp"

namespace simgpt {

using json = nlohmann::ordered_json;

TrainConfig TrainSection::to_train_config() const {
  if (!epochs) throw Error(ErrorCode::config, "train.epochs is required");
  TrainConfig tc;
  tc.epochs = *epochs;
  tc.learning_rate = learning_rate;
  tc.seed = seed;
  tc.use_margin_loss = use_margin_loss;
  tc.validate();
  return tc;
}

std::filesystem::path PipelineConfig::path(const std::string& key) const {
  auto it = paths.find(key);
  if (it == paths.end()) throw Error(ErrorCode::config, fmt::format("paths.{} is not configured", key));
  std::filesystem::path p(it->second);
  if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
  return p;
}

bool PipelineConfig::source_enabled(Genre genre) const {
  return std::find(sources_enabled.begin(), sources_enabled.end(), genre) != sources_enabled.end();
}

void PipelineConfig::validate() const {
  llm.validate();
  loss.validate();
  if (train.epochs && *train.epochs < 1) throw Error(ErrorCode::config, "train.epochs must be >= 1");
  if (!(train.learning_rate >= 0.0)) throw Error(ErrorCode::config, "train.learning_rate must be >= 0");
  if (train.dim < 2) throw Error(ErrorCode::config, "train.dim must be >= 2");
  if (icl_shots != 8 && icl_shots != 16 && icl_shots != 32) {
    throw Error(ErrorCode::config, "icl_shots must be 8, 16 or 32");
  }
  parse_prompt_variant(few_shot_variant);
  for (const auto& [genre, _] : sample_sizes) parse_genre(genre);
}

bool PipelineConfig::operator==(const PipelineConfig& o) const {
  return llm == o.llm && loss == o.loss && train == o.train && paths == o.paths &&
         sources_enabled == o.sources_enabled && nli_enabled == o.nli_enabled &&
         eval_tasks == o.eval_tasks && sample_sizes == o.sample_sizes &&
         few_shot_variant == o.few_shot_variant && few_shot_file == o.few_shot_file &&
         icl_shots == o.icl_shots;
}

PipelineConfig default_pipeline_config() {
  PipelineConfig c;
  c.paths = {
      {"triplets", "out/triplets.jsonl"},     {"rejects", "out/rejects.jsonl"},
      {"annotation_log", "out/annotation.log.jsonl"}, {"stats", "out/stats.txt"},
      {"encoder", "out/encoder.txt"},         {"metrics", "out/metrics.jsonl"},
      {"report", "out/report.jsonl"},         {"report_table", "out/report.txt"},
      {"icl_report", "out/icl.jsonl"},        {"ablation_dir", "out/ablation"},
  };
  return c;
}

std::vector<Genre> parse_source_list(std::string_view list) {
  std::set<Genre> picked;
  std::size_t start = 0;
  while (start <= list.size()) {
    auto comma = list.find(',', start);
    if (comma == std::string_view::npos) comma = list.size();
    const auto item = text::trim(list.substr(start, comma - start));
    if (!item.empty()) picked.insert(parse_genre(item));
    start = comma + 1;
  }
  if (picked.empty()) throw Error(ErrorCode::config, "source list is empty");
  return {picked.begin(), picked.end()};
}

namespace {

template <class T>
void read_key(const json& obj, const char* key, T& out) {
  if (auto it = obj.find(key); it != obj.end()) out = it->get<T>();
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> known, const char* where) {
  if (!obj.is_object()) throw Error(ErrorCode::config, fmt::format("{} must be an object", where));
  for (const auto& [key, _] : obj.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw Error(ErrorCode::config, fmt::format("unknown key '{}' in {}", key, where));
    }
  }
}

}  // namespace

std::string serialize_config(const PipelineConfig& c) {
  json j;
  j["llm"] = {
      {"model_name", c.llm.model_name},         {"temperature", c.llm.temperature},
      {"top_p", c.llm.top_p},                   {"frequency_penalty", c.llm.frequency_penalty},
      {"presence_penalty", c.llm.presence_penalty}, {"max_tokens", c.llm.max_tokens},
      {"endpoint_url", c.llm.endpoint_url},     {"max_retries", c.llm.max_retries},
      {"max_in_flight", c.llm.max_in_flight},   {"backoff_initial_ms", c.llm.backoff_initial_ms},
      {"request_timeout_s", c.llm.request_timeout_s},
  };
  j["loss"] = {
      {"tau", c.loss.tau},
      {"alpha", c.loss.alpha},
      {"lambda_m", c.loss.lambda_m},
      {"margin", c.loss.margin},
      {"batch_size", c.loss.batch_size},
      {"hard_negative", c.loss.hard_negative == HardNegative::argmin ? "argmin" : "argmax"},
  };
  json train = {
      {"learning_rate", c.train.learning_rate},
      {"seed", c.train.seed},
      {"use_margin_loss", c.train.use_margin_loss},
      {"dim", c.train.dim},
  };
  if (c.train.epochs) train["epochs"] = *c.train.epochs;
  j["train"] = train;
  j["paths"] = c.paths;
  json sources = json::array();
  for (auto g : c.sources_enabled) sources.push_back(std::string(to_string(g)));
  j["sources_enabled"] = sources;
  j["nli_enabled"] = c.nli_enabled;
  j["eval_tasks"] = c.eval_tasks;
  j["sample_sizes"] = c.sample_sizes;
  j["few_shot_variant"] = c.few_shot_variant;
  if (c.few_shot_file) j["few_shot_file"] = *c.few_shot_file;
  j["icl_shots"] = c.icl_shots;
  return j.dump(2) + "\n";
}

PipelineConfig parse_config(std::string_view text) {
  PipelineConfig c = default_pipeline_config();
  try {
    const json j = json::parse(text);
    reject_unknown(j,
                   {"llm", "loss", "train", "paths", "sources_enabled", "nli_enabled", "eval_tasks",
                    "sample_sizes", "few_shot_variant", "few_shot_file", "icl_shots"},
                   "config");
    if (auto it = j.find("llm"); it != j.end()) {
      const auto& l = *it;
      reject_unknown(l,
                     {"model_name", "temperature", "top_p", "frequency_penalty", "presence_penalty",
                      "max_tokens", "endpoint_url", "max_retries", "max_in_flight",
                      "backoff_initial_ms", "request_timeout_s"},
                     "llm");
      read_key(l, "model_name", c.llm.model_name);
      read_key(l, "temperature", c.llm.temperature);
      read_key(l, "top_p", c.llm.top_p);
      read_key(l, "frequency_penalty", c.llm.frequency_penalty);
      read_key(l, "presence_penalty", c.llm.presence_penalty);
      read_key(l, "max_tokens", c.llm.max_tokens);
      read_key(l, "endpoint_url", c.llm.endpoint_url);
      read_key(l, "max_retries", c.llm.max_retries);
      read_key(l, "max_in_flight", c.llm.max_in_flight);
      read_key(l, "backoff_initial_ms", c.llm.backoff_initial_ms);
      read_key(l, "request_timeout_s", c.llm.request_timeout_s);
    }
    if (auto it = j.find("loss"); it != j.end()) {
      const auto& l = *it;
      reject_unknown(l, {"tau", "alpha", "lambda_m", "margin", "batch_size", "hard_negative"}, "loss");
      read_key(l, "tau", c.loss.tau);
      read_key(l, "alpha", c.loss.alpha);
      read_key(l, "lambda_m", c.loss.lambda_m);
      read_key(l, "margin", c.loss.margin);
      read_key(l, "batch_size", c.loss.batch_size);
      std::string mode = "argmin";
      read_key(l, "hard_negative", mode);
      if (mode == "argmin") {
        c.loss.hard_negative = HardNegative::argmin;
      } else if (mode == "argmax") {
        c.loss.hard_negative = HardNegative::argmax;
      } else {
        throw Error(ErrorCode::config, fmt::format("loss.hard_negative must be argmin or argmax, got '{}'", mode));
      }
    }
    if (auto it = j.find("train"); it != j.end()) {
      const auto& t = *it;
      reject_unknown(t, {"epochs", "learning_rate", "seed", "use_margin_loss", "dim"}, "train");
      if (auto e = t.find("epochs"); e != t.end() && !e->is_null()) c.train.epochs = e->get<int>();
      read_key(t, "learning_rate", c.train.learning_rate);
      read_key(t, "seed", c.train.seed);
      read_key(t, "use_margin_loss", c.train.use_margin_loss);
      read_key(t, "dim", c.train.dim);
    }
    if (auto it = j.find("paths"); it != j.end()) {
      for (const auto& [key, value] : it->items()) c.paths[key] = value.get<std::string>();
    }
    if (auto it = j.find("sources_enabled"); it != j.end()) {
      std::string joined;
      for (const auto& g : *it) joined += g.get<std::string>() + ",";
      c.sources_enabled = parse_source_list(joined);
    }
    read_key(j, "nli_enabled", c.nli_enabled);
    if (auto it = j.find("eval_tasks"); it != j.end()) {
      c.eval_tasks.clear();
      for (const auto& [key, value] : it->items()) c.eval_tasks[key] = value.get<std::string>();
    }
    if (auto it = j.find("sample_sizes"); it != j.end()) {
      for (const auto& [key, value] : it->items()) {
        c.sample_sizes[std::string(to_string(parse_genre(key)))] = value.get<std::size_t>();
      }
    }
    read_key(j, "few_shot_variant", c.few_shot_variant);
    if (auto it = j.find("few_shot_file"); it != j.end() && !it->is_null()) {
      c.few_shot_file = it->get<std::string>();
    }
    read_key(j, "icl_shots", c.icl_shots);
    c.validate();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::config, fmt::format("invalid config: {}", e.what()));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::config) throw;
    throw Error(ErrorCode::config, fmt::format("invalid config: {}", e.what()));
  }
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::config, fmt::format("config file not found: '{}'", path.string()));
  }
  PipelineConfig c = parse_config(read_file(path));
  c.base_dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  return c;
}

}  // namespace simgpt
