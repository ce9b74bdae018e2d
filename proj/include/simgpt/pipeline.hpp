#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "simgpt/annotation.hpp"
#include "simgpt/config.hpp"
#include "simgpt/corpus.hpp"
#include "simgpt/sts_eval.hpp"
#include "simgpt/train.hpp"

namespace simgpt {

struct IngestSummary {
  std::vector<std::pair<std::string, CorpusStats>> rows;
  std::size_t skipped_invalid = 0;
};

struct AnnotateSummary {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t requests_issued = 0;
  std::size_t replayed = 0;
  std::vector<AnnotatedTriplet> records;
};

struct TrainSummary {
  std::size_t gpt_triplets = 0;
  std::size_t nli_triplets = 0;
  std::size_t batch_size = 0;
  std::vector<EpochMetrics> metrics;
};

struct IclRecord {
  std::string sentence_a;
  std::string sentence_b;
  double gold = 0.0;
  std::optional<double> score;  // unset when unparsable or the request failed
  std::string status;           // "ok", a parse reason, or "transport"
  std::string raw_output;
};

struct IclSummary {
  IclEvaluation evaluation;
  std::vector<IclRecord> records;
};

struct AblationRow {
  std::string name;
  std::vector<Genre> sources;
  std::size_t train_size = 0;
  EvalReport report;
};

// Each command reads its inputs from the config, prints a human readable
// summary to `out` and writes its outputs through temp files and renames.
IngestSummary cmd_ingest(const PipelineConfig& config, std::ostream& out);
AnnotateSummary cmd_annotate(const PipelineConfig& config, bool resume, std::ostream& out);
TrainSummary cmd_train(const PipelineConfig& config, std::ostream& out);
EvalReport cmd_eval(const PipelineConfig& config, std::ostream& out);
IclSummary cmd_icl_eval(const PipelineConfig& config, std::ostream& out);
std::vector<AblationRow> cmd_ablate_sources(const PipelineConfig& config, std::ostream& out);

// Non-empty subsets of the three genres in table order.
std::vector<std::vector<Genre>> ablation_combinations();
std::string ablation_label(const std::vector<Genre>& sources);
std::string render_ablation_table(const std::vector<AblationRow>& rows);

}  // namespace simgpt
