#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "simgpt/annotation.hpp"
#include "simgpt/contrastive.hpp"
#include "simgpt/corpus.hpp"
#include "simgpt/train.hpp"

namespace simgpt {

struct TrainSection {
  std::optional<int> epochs;  // required by train; no default
  double learning_rate = 5e-5;
  std::uint64_t seed = 42;
  bool use_margin_loss = false;
  std::size_t dim = 64;

  TrainConfig to_train_config() const;
  bool operator==(const TrainSection&) const = default;
};

// Everything a pipeline command needs. Serialized as one JSON document whose
// nested keys mirror these fields; every section and key is optional and
// unknown keys are rejected.
struct PipelineConfig {
  LLMConfig llm;
  LossConfig loss;
  TrainSection train;
  // Named file locations. Recognized keys: caption, question, multigenre,
  // nli, triplets, rejects, annotation_log, stats, encoder, metrics,
  // report, report_table, icl_task, icl_report, ablation_dir.
  std::map<std::string, std::string> paths;
  std::vector<Genre> sources_enabled{Genre::caption, Genre::question, Genre::multigenre};
  bool nli_enabled = true;
  std::map<std::string, std::string> eval_tasks;      // task name -> TSV path
  std::map<std::string, std::size_t> sample_sizes;    // genre -> k
  std::string few_shot_variant = "default8";
  std::optional<std::string> few_shot_file;
  int icl_shots = 8;

  // Directory relative paths resolve against; not serialized.
  std::filesystem::path base_dir;

  std::filesystem::path path(const std::string& key) const;
  bool has_path(const std::string& key) const { return paths.contains(key); }
  bool source_enabled(Genre genre) const;
  void validate() const;

  bool operator==(const PipelineConfig& other) const;
};

PipelineConfig default_pipeline_config();

std::string serialize_config(const PipelineConfig& config);
PipelineConfig parse_config(std::string_view text);
// base_dir becomes the file's directory.
PipelineConfig load_config(const std::filesystem::path& path);

// "caption,question" -> genres in canonical order.
std::vector<Genre> parse_source_list(std::string_view list);

}  // namespace simgpt
