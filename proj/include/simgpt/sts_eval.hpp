#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "simgpt/encoder.hpp"

namespace simgpt {

struct STSPair {
  std::string sentence_a;
  std::string sentence_b;
  double gold = 0.0;

  bool operator==(const STSPair&) const = default;
};

// Tab-separated `gold \t sentence_a \t sentence_b`, no header, gold in [0, 5].
std::vector<STSPair> load_sts_task(const std::filesystem::path& path);

// (c + 1) * 2.5, for c in [-1, 1].
double scale_score(double cosine_value);

// Average (fractional) ranks, 1-based; ties share the mean of their span.
std::vector<double> fractional_ranks(std::span<const double> values);

// Pearson correlation of fractional ranks. Throws constant_input when either
// side has fewer than two distinct values.
double spearman(std::span<const double> xs, std::span<const double> ys);

struct TaskResult {
  double rho = 0.0;
  std::size_t pair_count = 0;
};

// Scaled cosine of encode(a), encode(b) per pair against gold.
std::vector<double> predict_scores(const Encoder& encoder, std::span<const STSPair> pairs);
TaskResult evaluate_task(const Encoder& encoder, std::span<const STSPair> pairs);

struct TaskReport {
  std::string task;
  std::optional<double> rho;  // unset when the task failed
  std::size_t pair_count = 0;
  std::string status;         // "ok" or "failed: <reason>"
};

struct EvalReport {
  std::vector<TaskReport> per_task;  // benchmark column order first
  std::optional<double> average;     // mean rho over successful tasks
  std::vector<std::string> warnings;

  std::string render_table() const;
  // One record per task plus an "Avg" record: task, rho, pair_count, status.
  std::string render_records() const;
};

// Standard benchmark column order: STS12..STS16, STS-B, SICK-R.
const std::vector<std::string>& benchmark_task_order();

// Failed tasks are reported and left out of the average.
EvalReport evaluate_suite(const Encoder& encoder,
                          std::span<const std::pair<std::string, std::filesystem::path>> tasks);

struct IclEvaluation {
  double rho = 0.0;
  std::size_t unparsable_count = 0;
  std::size_t pair_count = 0;
};

// Unparsable predictions (empty) enter the correlation at the 2.5 midpoint.
IclEvaluation evaluate_icl(std::span<const std::optional<double>> predicted,
                           std::span<const STSPair> gold_pairs);

}  // namespace simgpt
