#include "simgpt/train.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <numeric>

#include "simgpt/error.hpp"
#include "simgpt/rng.hpp"

namespace simgpt {

void TrainConfig::validate() const {
  if (epochs < 1) throw Error(ErrorCode::invalid_argument, "train: epochs must be >= 1");
  if (!(learning_rate >= 0.0)) {
    throw Error(ErrorCode::invalid_argument, "train: learning_rate must be >= 0");
  }
}

TextBatch make_batch(std::span<const TrainingTriplet> triplets) {
  TextBatch b;
  b.anchors.reserve(triplets.size());
  b.positives.reserve(triplets.size());
  b.negatives.reserve(triplets.size());
  for (const auto& t : triplets) {
    b.anchors.push_back(t.origin);
    b.positives.push_back(t.positive);
    b.negatives.push_back(t.negative);
  }
  return b;
}

LossFunction make_loss(const LossConfig& cfg, bool use_margin_loss) {
  LossConfig effective = cfg;
  if (!use_margin_loss) effective.lambda_m = 0.0;
  return [effective](const Matrix& h, const Matrix& p, const Matrix& n, EmbeddingGrads* g) {
    return total_loss(h, p, n, effective, g);
  };
}

double batch_loss_and_gradient(const LossFunction& loss, const Encoder& encoder,
                               const TextBatch& batch, std::vector<double>* gradient) {
  const Matrix h = encoder.encode(batch.anchors);
  const Matrix p = encoder.encode(batch.positives);
  const Matrix n = encoder.encode(batch.negatives);
  if (!gradient) return loss(h, p, n, nullptr);
  EmbeddingGrads g;
  const double value = loss(h, p, n, &g);
  *gradient = encoder.backward(batch.anchors, g.anchor);
  const auto gp = encoder.backward(batch.positives, g.positive);
  const auto gn = encoder.backward(batch.negatives, g.negative);
  for (std::size_t k = 0; k < gradient->size(); ++k) (*gradient)[k] += gp[k] + gn[k];
  return value;
}

std::vector<EpochMetrics> train(std::span<const TrainingTriplet> dataset, Encoder& encoder,
                                const TrainConfig& tc, const LossConfig& lc) {
  tc.validate();
  lc.validate();
  if (dataset.size() < lc.batch_size) {
    throw Error(ErrorCode::invalid_argument,
                fmt::format("dataset of {} triplets is smaller than one batch of {}", dataset.size(),
                            lc.batch_size));
  }
  const auto loss = make_loss(lc, tc.use_margin_loss);
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(tc.seed);
  rng.shuffle(order);
  std::vector<EpochMetrics> metrics;
  std::vector<TrainingTriplet> chunk(lc.batch_size);
  std::vector<double> gradient;
  for (int epoch = 1; epoch <= tc.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    const std::size_t batches = dataset.size() / lc.batch_size;
    double sum = 0.0;
    for (std::size_t b = 0; b < batches; ++b) {
      for (std::size_t k = 0; k < lc.batch_size; ++k) chunk[k] = dataset[order[b * lc.batch_size + k]];
      const double value = batch_loss_and_gradient(loss, encoder, make_batch(chunk), &gradient);
      if (!std::isfinite(value)) {
        throw Error(ErrorCode::non_finite, fmt::format("non-finite loss in epoch {}", epoch));
      }
      sum += value;
      encoder.apply_gradient(gradient, tc.learning_rate);
    }
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    metrics.push_back({epoch, sum / static_cast<double>(batches), elapsed.count()});
  }
  return metrics;
}

double max_relative_error(const std::function<double(std::span<const double>)>& f,
                          std::span<const double> analytic, std::span<const double> point,
                          double epsilon) {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::invalid_argument, "epsilon must be > 0");
  if (analytic.size() != point.size()) {
    throw Error(ErrorCode::dimension_mismatch, "analytic gradient length differs from the point");
  }
  if (!std::isfinite(f(point))) throw Error(ErrorCode::non_finite, "loss is not finite at the check point");
  std::vector<double> x(point.begin(), point.end());
  double worst = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double saved = x[k];
    x[k] = saved + epsilon;
    const double up = f(x);
    x[k] = saved - epsilon;
    const double down = f(x);
    x[k] = saved;
    const double numeric = (up - down) / (2.0 * epsilon);
    const double a = analytic[k];
    const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
    worst = std::max(worst, std::abs(a - numeric) / denom);
  }
  return worst;
}

double gradient_check(const LossFunction& loss, Encoder& encoder, const TextBatch& batch,
                      const GradientCheckOptions& options) {
  const std::vector<double> original(encoder.parameters().begin(), encoder.parameters().end());
  if (original.size() > options.max_parameters) {
    throw Error(ErrorCode::invalid_argument,
                fmt::format("{} parameters exceed the gradient-check cap of {}", original.size(),
                            options.max_parameters));
  }
  std::vector<double> analytic;
  batch_loss_and_gradient(loss, encoder, batch, &analytic);
  auto f = [&](std::span<const double> theta) {
    encoder.set_parameters(theta);
    return batch_loss_and_gradient(loss, encoder, batch, nullptr);
  };
  double worst = 0.0;
  try {
    worst = max_relative_error(f, analytic, original, options.epsilon);
  } catch (...) {
    encoder.set_parameters(original);
    throw;
  }
  encoder.set_parameters(original);
  return worst;
}

}  // namespace simgpt
