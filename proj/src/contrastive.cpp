#include "simgpt/contrastive.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "simgpt/error.hpp"

namespace simgpt {

void LossConfig::validate() const {
  if (!(tau > 0.0)) throw Error(ErrorCode::invalid_argument, "loss: tau must be > 0");
  if (!(alpha >= 0.0)) throw Error(ErrorCode::invalid_argument, "loss: alpha must be >= 0");
  if (!(lambda_m >= 0.0)) throw Error(ErrorCode::invalid_argument, "loss: lambda_m must be >= 0");
  if (!(margin >= 0.0)) throw Error(ErrorCode::invalid_argument, "loss: margin must be >= 0");
  if (batch_size < 1) throw Error(ErrorCode::invalid_argument, "loss: batch_size must be >= 1");
}

void EmbeddingGrads::reset(Eigen::Index rows, Eigen::Index cols) {
  anchor = Matrix::Zero(rows, cols);
  positive = Matrix::Zero(rows, cols);
  negative = Matrix::Zero(rows, cols);
}

namespace {

struct CosineTerm {
  double value;
  double norm_u;
  double norm_v;
};

CosineTerm cosine_term(const Eigen::Ref<const RowVector>& u, const Eigen::Ref<const RowVector>& v) {
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) throw Error(ErrorCode::zero_norm, "cosine of a zero vector");
  const double c = u.dot(v) / (nu * nv);
  return {std::clamp(c, -1.0, 1.0), nu, nv};
}

// Adds weight * d cos(u, v) to du and dv.
template <class RowU, class RowV>
void add_cosine_grad(const Eigen::Ref<const RowVector>& u, const Eigen::Ref<const RowVector>& v,
                     const CosineTerm& t, double weight, RowU&& du, RowV&& dv) {
  if (weight == 0.0) return;
  const double inv = 1.0 / (t.norm_u * t.norm_v);
  du += weight * (v * inv - (t.value / (t.norm_u * t.norm_u)) * u);
  dv += weight * (u * inv - (t.value / (t.norm_v * t.norm_v)) * v);
}

void check_shapes(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::dimension_mismatch,
                fmt::format("{}: shape {}x{} vs {}x{}", what, a.rows(), a.cols(), b.rows(), b.cols()));
  }
}

void check_batch(const Matrix& anchors, const LossConfig& cfg) {
  cfg.validate();
  if (anchors.cols() == 0) throw Error(ErrorCode::dimension_mismatch, "embedding dimension is 0");
  if (static_cast<std::size_t>(anchors.rows()) != cfg.batch_size) {
    throw Error(ErrorCode::dimension_mismatch,
                fmt::format("batch has {} rows, batch_size is {}", anchors.rows(), cfg.batch_size));
  }
}

}  // namespace

double cosine(const Eigen::Ref<const RowVector>& u, const Eigen::Ref<const RowVector>& v) {
  if (u.size() != v.size()) {
    throw Error(ErrorCode::dimension_mismatch,
                fmt::format("cosine of vectors with {} and {} entries", u.size(), v.size()));
  }
  return cosine_term(u, v).value;
}

double contrastive_loss(const Matrix& anchors, const Matrix& positives, const Matrix& negatives,
                        const LossConfig& cfg, EmbeddingGrads* grads) {
  check_shapes(anchors, positives, "positives");
  check_shapes(anchors, negatives, "negatives");
  check_batch(anchors, cfg);
  const Eigen::Index n = anchors.rows();
  const bool use_negatives = cfg.alpha > 0.0;

  std::vector<CosineTerm> pos(static_cast<std::size_t>(n * n));
  std::vector<CosineTerm> neg(use_negatives ? static_cast<std::size_t>(n * n) : 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      pos[i * n + j] = cosine_term(anchors.row(i), positives.row(j));
      if (use_negatives) neg[i * n + j] = cosine_term(anchors.row(i), negatives.row(j));
    }
  }

  if (grads) grads->reset(n, anchors.cols());
  const double inv_n = 1.0 / static_cast<double>(n);
  double total = 0.0;
  std::vector<double> pos_w(static_cast<std::size_t>(n));
  std::vector<double> neg_w(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    double peak = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j) {
      peak = std::max(peak, pos[i * n + j].value / cfg.tau);
      if (use_negatives) peak = std::max(peak, neg[i * n + j].value / cfg.tau);
    }
    double z = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      pos_w[j] = std::exp(pos[i * n + j].value / cfg.tau - peak);
      z += pos_w[j];
      if (use_negatives) {
        neg_w[j] = cfg.alpha * std::exp(neg[i * n + j].value / cfg.tau - peak);
        z += neg_w[j];
      }
    }
    const double log_z = peak + std::log(z);
    total += log_z - pos[i * n + i].value / cfg.tau;

    if (!grads) continue;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double dp = (pos_w[j] / z - (i == j ? 1.0 : 0.0)) * inv_n / cfg.tau;
      add_cosine_grad(anchors.row(i), positives.row(j), pos[i * n + j], dp, grads->anchor.row(i),
                      grads->positive.row(j));
      if (use_negatives) {
        const double dn = (neg_w[j] / z) * inv_n / cfg.tau;
        add_cosine_grad(anchors.row(i), negatives.row(j), neg[i * n + j], dn, grads->anchor.row(i),
                        grads->negative.row(j));
      }
    }
  }
  return total * inv_n;
}

std::size_t hardest_index(const Matrix& anchors, std::size_t i, HardNegative mode) {
  const auto n = static_cast<std::size_t>(anchors.rows());
  if (n < 2) throw Error(ErrorCode::no_candidate, "hardest_index needs at least two rows");
  if (i >= n) throw Error(ErrorCode::invalid_argument, fmt::format("row {} out of range", i));
  std::size_t best = n;
  double best_value = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j == i) continue;
    const double c = cosine(anchors.row(static_cast<Eigen::Index>(i)),
                            anchors.row(static_cast<Eigen::Index>(j)));
    const bool better = mode == HardNegative::argmin ? c < best_value : c > best_value;
    if (best == n || better) {
      best = j;
      best_value = c;
    }
  }
  return best;
}

double margin_loss(const Matrix& anchors, const Matrix& positives, const LossConfig& cfg,
                   EmbeddingGrads* grads) {
  check_shapes(anchors, positives, "positives");
  check_batch(anchors, cfg);
  const Eigen::Index n = anchors.rows();
  if (n < 2) throw Error(ErrorCode::no_candidate, "margin loss needs at least two rows");
  if (grads && grads->anchor.rows() != n) grads->reset(n, anchors.cols());
  const double inv_n = 1.0 / static_cast<double>(n);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto j = static_cast<Eigen::Index>(hardest_index(anchors, static_cast<std::size_t>(i),
                                                           cfg.hard_negative));
    const auto hard = cosine_term(anchors.row(i), anchors.row(j));
    const auto pos = cosine_term(anchors.row(i), positives.row(i));
    const double arg = cfg.margin + hard.value - pos.value;
    if (arg <= 0.0) continue;
    total += arg;
    if (!grads) continue;
    add_cosine_grad(anchors.row(i), anchors.row(j), hard, inv_n, grads->anchor.row(i),
                    grads->anchor.row(j));
    add_cosine_grad(anchors.row(i), positives.row(i), pos, -inv_n, grads->anchor.row(i),
                    grads->positive.row(i));
  }
  return total * inv_n;
}

double total_loss(const Matrix& anchors, const Matrix& positives, const Matrix& negatives,
                  const LossConfig& cfg, EmbeddingGrads* grads) {
  const double cl = contrastive_loss(anchors, positives, negatives, cfg, grads);
  if (cfg.lambda_m == 0.0) return cl;
  EmbeddingGrads margin_grads;
  if (grads) margin_grads.reset(anchors.rows(), anchors.cols());
  const double ml = margin_loss(anchors, positives, cfg, grads ? &margin_grads : nullptr);
  if (grads) {
    grads->anchor += cfg.lambda_m * margin_grads.anchor;
    grads->positive += cfg.lambda_m * margin_grads.positive;
  }
  return cl + cfg.lambda_m * ml;
}

}  // namespace simgpt
