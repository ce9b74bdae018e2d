#pragma once

#include <Eigen/Dense>

#include <cstddef>

namespace simgpt {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::RowVectorXd;

enum class HardNegative { argmin, argmax };

struct LossConfig {
  double tau = 0.05;
  double alpha = 1.0;
  double lambda_m = 0.0;
  double margin = 0.0;
  std::size_t batch_size = 512;
  HardNegative hard_negative = HardNegative::argmin;

  void validate() const;
  bool operator==(const LossConfig&) const = default;
};

// Gradients of a loss with respect to each embedding matrix.
struct EmbeddingGrads {
  Matrix anchor;
  Matrix positive;
  Matrix negative;

  void reset(Eigen::Index rows, Eigen::Index cols);
};

// u.v / (|u||v|), clamped to [-1, 1]. Throws zero_norm for an all-zero input.
double cosine(const Eigen::Ref<const RowVector>& u, const Eigen::Ref<const RowVector>& v);

// Weighted-negative InfoNCE, averaged over anchors:
//   loss_i = -log( e^{s(h_i,p_i)/tau} /
//                  sum_j ( e^{s(h_i,p_j)/tau} + alpha e^{s(h_i,n_j)/tau} ) )
// When `grads` is non-null its matrices are overwritten with dL/dH.
double contrastive_loss(const Matrix& anchors, const Matrix& positives, const Matrix& negatives,
                        const LossConfig& cfg, EmbeddingGrads* grads = nullptr);

// Index j != i picked by cosine to row i: the least similar for argmin, the
// most similar for argmax. Ties go to the smallest index.
std::size_t hardest_index(const Matrix& anchors, std::size_t i,
                          HardNegative mode = HardNegative::argmin);

// mean_i max(0, m + s(h_i, h_i*) - s(h_i, p_i)), h_i* from hardest_index.
// Subgradient 0 at the kink. Accumulates into `grads` when non-null.
double margin_loss(const Matrix& anchors, const Matrix& positives, const LossConfig& cfg,
                   EmbeddingGrads* grads = nullptr);

// contrastive + lambda_m * margin. lambda_m == 0 returns the contrastive term
// unchanged (the margin term is not evaluated).
double total_loss(const Matrix& anchors, const Matrix& positives, const Matrix& negatives,
                  const LossConfig& cfg, EmbeddingGrads* grads = nullptr);

}  // namespace simgpt
