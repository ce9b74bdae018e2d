#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "simgpt/contrastive.hpp"
#include "simgpt/corpus.hpp"
#include "simgpt/encoder.hpp"

namespace simgpt {

struct TrainConfig {
  int epochs = 1;
  double learning_rate = 5e-5;
  std::uint64_t seed = 42;
  bool use_margin_loss = false;

  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

struct EpochMetrics {
  int epoch = 0;
  double mean_loss = 0.0;
  double wall_seconds = 0.0;
};

struct TextBatch {
  std::vector<std::string> anchors;
  std::vector<std::string> positives;
  std::vector<std::string> negatives;
};

TextBatch make_batch(std::span<const TrainingTriplet> triplets);

// Loss over (anchors, positives, negatives) embeddings; fills `grads` when
// non-null.
using LossFunction =
    std::function<double(const Matrix&, const Matrix&, const Matrix&, EmbeddingGrads*)>;

LossFunction make_loss(const LossConfig& cfg, bool use_margin_loss);

// Loss and parameter gradient of one batch through the encoder.
double batch_loss_and_gradient(const LossFunction& loss, const Encoder& encoder,
                               const TextBatch& batch, std::vector<double>* gradient);

// One seeded shuffle fixes the batches, which every epoch visits in the same
// order; batches of cfg.batch_size with the short tail dropped, one gradient
// step per batch. mean_loss averages the pre-update
// batch losses of the epoch.
std::vector<EpochMetrics> train(std::span<const TrainingTriplet> dataset, Encoder& encoder,
                                const TrainConfig& tc, const LossConfig& lc);

struct GradientCheckOptions {
  double epsilon = 1e-5;
  std::size_t max_parameters = 500;
};

// max_k |a_k - n_k| / max(|a_k|, |n_k|, 1e-8), with n_k the central
// difference (f(x + eps e_k) - f(x - eps e_k)) / 2 eps.
double max_relative_error(const std::function<double(std::span<const double>)>& f,
                          std::span<const double> analytic, std::span<const double> point,
                          double epsilon);

// Checks the analytic parameter gradient of `loss` through `encoder` on
// `batch`. The encoder's parameters are restored before returning.
double gradient_check(const LossFunction& loss, Encoder& encoder, const TextBatch& batch,
                      const GradientCheckOptions& options = {});

}  // namespace simgpt
