#include "doctest.h"

#include <cmath>
#include <numbers>

#include "simgpt/contrastive.hpp"
#include "simgpt/error.hpp"
#include "simgpt/rng.hpp"

using namespace simgpt;

namespace {

Matrix random_matrix(Rng& rng, int rows, int cols) {
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = rng.normal();
  }
  return m;
}

// Plain-loop cosine, independent of the library's.
double naive_cos(const Matrix& a, int i, const Matrix& b, int j) {
  double dot = 0, na = 0, nb = 0;
  for (int k = 0; k < a.cols(); ++k) {
    dot += a(i, k) * b(j, k);
    na += a(i, k) * a(i, k);
    nb += b(j, k) * b(j, k);
  }
  return dot / std::sqrt(na * nb);
}

// Cross-entropy of the row-wise softmax over the N x N positive similarity
// matrix with diagonal targets.
double softmax_ce_oracle(const Matrix& h, const Matrix& p, double tau) {
  const int n = static_cast<int>(h.rows());
  double total = 0;
  for (int i = 0; i < n; ++i) {
    std::vector<double> logits(n);
    double mx = -1e300;
    for (int j = 0; j < n; ++j) {
      logits[j] = naive_cos(h, i, p, j) / tau;
      mx = std::max(mx, logits[j]);
    }
    double z = 0;
    for (double l : logits) z += std::exp(l - mx);
    total += -(logits[i] - mx - std::log(z));
  }
  return total / n;
}

// Direct evaluation of the weighted-negative loss with explicit sums.
double weighted_oracle(const Matrix& h, const Matrix& p, const Matrix& neg, double tau, double alpha) {
  const int n = static_cast<int>(h.rows());
  long double total = 0;
  for (int i = 0; i < n; ++i) {
    long double denom = 0;
    for (int j = 0; j < n; ++j) {
      denom += std::exp(static_cast<long double>(naive_cos(h, i, p, j) / tau));
      denom += alpha * std::exp(static_cast<long double>(naive_cos(h, i, neg, j) / tau));
    }
    total += -(naive_cos(h, i, p, i) / tau - std::log(denom));
  }
  return static_cast<double>(total / n);
}

std::size_t brute_hardest(const Matrix& h, int i, bool minimize) {
  int best = -1;
  double best_val = 0;
  for (int j = 0; j < h.rows(); ++j) {
    if (j == i) continue;
    const double s = naive_cos(h, i, h, j);
    if (best < 0 || (minimize ? s < best_val : s > best_val)) {
      best = j;
      best_val = s;
    }
  }
  return static_cast<std::size_t>(best);
}

LossConfig cfg_for(int n, double tau = 0.05, double alpha = 1.0) {
  LossConfig c;
  c.batch_size = static_cast<std::size_t>(n);
  c.tau = tau;
  c.alpha = alpha;
  return c;
}

Matrix unit_row(double angle) {
  Matrix m(1, 2);
  m << std::cos(angle), std::sin(angle);
  return m;
}

Matrix stack(std::initializer_list<Matrix> rows) {
  Matrix out(static_cast<int>(rows.size()), rows.begin()->cols());
  int r = 0;
  for (const auto& m : rows) out.row(r++) = m.row(0);
  return out;
}

}  // namespace

TEST_CASE("cosine") {
  RowVector v(3);
  v << 1, 2, 3;
  RowVector w(3);
  w << 4, 5, 6;
  CHECK(cosine(v, v) == doctest::Approx(1.0).epsilon(1e-15));
  RowVector e1(2), e2(2);
  e1 << 1, 0;
  e2 << 0, 1;
  CHECK(cosine(e1, e2) == 0.0);
  CHECK(std::abs(cosine(v, w) - 0.974631846) < 1e-6);
  CHECK(std::abs(cosine(v, w) - 32.0 / std::sqrt(14.0 * 77.0)) < 1e-15);
  RowVector zero = RowVector::Zero(3);
  try {
    cosine(zero, v);
    FAIL("expected zero_norm");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::zero_norm);
  }
  try {
    cosine(e1, v);
    FAIL("expected dimension_mismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::dimension_mismatch);
  }
}

TEST_CASE("cosine is invariant to positive rescaling") {
  Rng rng(2);
  for (int t = 0; t < 100; ++t) {
    const Matrix m = random_matrix(rng, 2, 5);
    const double c = 0.01 + rng.unit() * 100.0;
    CHECK(std::abs(cosine(m.row(0) * c, m.row(1)) - cosine(m.row(0), m.row(1))) < 1e-10);
  }
}

TEST_CASE("contrastive loss: single-pair cases") {
  Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    const Matrix h = random_matrix(rng, 1, 4), p = random_matrix(rng, 1, 4), n = random_matrix(rng, 1, 4);
    CHECK(contrastive_loss(h, p, n, cfg_for(1, 0.05, 0.0)) == 0.0);
  }
  // s(h, p) = 0.9, s(h, n) = 0.1
  const Matrix h = unit_row(0.0);
  const Matrix p = unit_row(std::acos(0.9));
  const Matrix n = unit_row(-std::acos(0.1));
  const double loss = contrastive_loss(h, p, n, cfg_for(1, 1.0, 1.0));
  CHECK(std::abs(loss - 0.371101) < 1e-5);
  CHECK(std::abs(loss - std::log(1.0 + std::exp(-0.8))) < 1e-12);
}

TEST_CASE("contrastive loss with alpha 0 equals row-softmax cross-entropy") {
  Rng rng(100);
  for (int n : {2, 4, 8}) {
    for (int d : {4, 8, 16}) {
      for (int t = 0; t < 5; ++t) {
        const Matrix h = random_matrix(rng, n, d), p = random_matrix(rng, n, d), neg = random_matrix(rng, n, d);
        const double tau = 0.05 + rng.unit();
        CHECK(std::abs(contrastive_loss(h, p, neg, cfg_for(n, tau, 0.0)) - softmax_ce_oracle(h, p, tau)) < 1e-10);
      }
    }
  }
}

TEST_CASE("contrastive loss matches the explicit-sum evaluation") {
  Rng rng(101);
  for (int t = 0; t < 50; ++t) {
    const int n = 1 + static_cast<int>(rng.below(8));
    const int d = 2 + static_cast<int>(rng.below(10));
    const Matrix h = random_matrix(rng, n, d), p = random_matrix(rng, n, d), neg = random_matrix(rng, n, d);
    const double tau = 0.05 + rng.unit();
    const double alpha = rng.unit() * 2.0;
    CHECK(std::abs(contrastive_loss(h, p, neg, cfg_for(n, tau, alpha)) - weighted_oracle(h, p, neg, tau, alpha)) < 1e-10);
  }
}

TEST_CASE("contrastive loss is non-negative and non-decreasing in alpha") {
  Rng rng(102);
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + static_cast<int>(rng.below(8));
    const Matrix h = random_matrix(rng, n, 6), p = random_matrix(rng, n, 6), neg = random_matrix(rng, n, 6);
    double prev = -1.0;
    for (double alpha : {0.0, 0.5, 0.8, 1.0}) {
      const double l = contrastive_loss(h, p, neg, cfg_for(n, 0.1, alpha));
      CHECK(l >= 0.0);
      CHECK(l >= prev);
      prev = l;
    }
  }
}

TEST_CASE("losses are invariant to positive rescaling of a row") {
  Rng rng(103);
  for (int t = 0; t < 50; ++t) {
    const int n = 2 + static_cast<int>(rng.below(6));
    Matrix h = random_matrix(rng, n, 5), p = random_matrix(rng, n, 5), neg = random_matrix(rng, n, 5);
    auto cfg = cfg_for(n, 0.1, 1.0);
    cfg.lambda_m = 0.5;
    cfg.margin = 0.3;
    const double before = total_loss(h, p, neg, cfg);
    const auto r = static_cast<int>(rng.below(n));
    const double c = 0.1 + rng.unit() * 10.0;
    switch (rng.below(3)) {
      case 0: h.row(r) *= c; break;
      case 1: p.row(r) *= c; break;
      default: neg.row(r) *= c; break;
    }
    CHECK(std::abs(total_loss(h, p, neg, cfg) - before) < 1e-10);
  }
}

TEST_CASE("contrastive loss rejects batch shape mismatches") {
  Rng rng(5);
  const Matrix h = random_matrix(rng, 4, 3);
  CHECK_THROWS_AS(contrastive_loss(h, h, h, cfg_for(3)), Error);
  const Matrix wide = random_matrix(rng, 4, 5);
  CHECK_THROWS_AS(contrastive_loss(h, wide, h, cfg_for(4)), Error);
}

TEST_CASE("loss config validation") {
  LossConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.alpha == 1.0);
  c.tau = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = LossConfig{};
  c.alpha = -1.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = LossConfig{};
  c.batch_size = 0;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("hardest_index") {
  Matrix h(3, 2);
  h << 1, 0, 0.99, 0.14, -1, 0;
  CHECK(hardest_index(h, 0) == 2);
  CHECK(hardest_index(h, 0, HardNegative::argmax) == 1);
  Matrix tie(3, 2);
  tie << 1, 0, -1, 0, -2, 0;
  CHECK(hardest_index(tie, 0) == 1);
  Matrix single(1, 2);
  single << 1, 0;
  try {
    hardest_index(single, 0);
    FAIL("expected no_candidate");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::no_candidate);
  }
}

TEST_CASE("hardest_index agrees with exhaustive search") {
  Rng rng(6);
  for (int t = 0; t < 200; ++t) {
    const int n = 2 + static_cast<int>(rng.below(15));
    const Matrix h = random_matrix(rng, n, 4);
    for (int i = 0; i < n; ++i) {
      CHECK(hardest_index(h, i) == brute_hardest(h, i, true));
      CHECK(hardest_index(h, i, HardNegative::argmax) == brute_hardest(h, i, false));
    }
  }
}

TEST_CASE("margin loss") {
  auto cfg = cfg_for(2);
  cfg.margin = 0.2;
  {
    Matrix h(2, 2);
    h << 1, 0, -1, 0;
    CHECK(margin_loss(h, h, cfg) == 0.0);
  }
  {
    const double a = std::acos(0.2);
    const double sixty = std::numbers::pi / 3.0;
    const Matrix h = stack({unit_row(0.0), unit_row(sixty)});
    const Matrix p = stack({unit_row(-a), unit_row(sixty + a)});
    CHECK(std::abs(margin_loss(h, p, cfg) - 0.5) < 1e-12);
  }
  Rng rng(7);
  cfg.margin = 0.0;
  for (int t = 0; t < 50; ++t) {
    const int n = 2 + static_cast<int>(rng.below(6));
    const Matrix h = random_matrix(rng, n, 4);
    CHECK(margin_loss(h, h, cfg_for(n)) == 0.0);
  }
}

TEST_CASE("total loss composition") {
  Rng rng(8);
  for (int t = 0; t < 50; ++t) {
    const int n = 2 + static_cast<int>(rng.below(6));
    const Matrix h = random_matrix(rng, n, 4), p = random_matrix(rng, n, 4), neg = random_matrix(rng, n, 4);
    auto cfg = cfg_for(n, 0.1, 1.0);
    cfg.margin = 0.5;
    cfg.lambda_m = 0.0;
    CHECK(total_loss(h, p, neg, cfg) == contrastive_loss(h, p, neg, cfg));
    cfg.lambda_m = 1.0;
    CHECK(std::abs(total_loss(h, p, neg, cfg) - (contrastive_loss(h, p, neg, cfg) + margin_loss(h, p, cfg))) < 1e-12);
    cfg.lambda_m = 10.0;
    if (margin_loss(h, p, cfg) > 0.0) CHECK(total_loss(h, p, neg, cfg) > contrastive_loss(h, p, neg, cfg));
  }
}

TEST_CASE("embedding gradients match central differences") {
  Rng rng(9);
  for (int t = 0; t < 20; ++t) {
    const int n = 2 + static_cast<int>(rng.below(5));
    const int d = 3 + static_cast<int>(rng.below(4));
    Matrix h = random_matrix(rng, n, d), p = random_matrix(rng, n, d), neg = random_matrix(rng, n, d);
    auto cfg = cfg_for(n, 0.2 + rng.unit(), rng.unit() * 2.0);
    cfg.margin = 0.3;
    cfg.lambda_m = (t % 2 == 0) ? 0.0 : 0.5;
    EmbeddingGrads g;
    total_loss(h, p, neg, cfg, &g);
    const double eps = 1e-6;
    double max_err = 0;
    for (Matrix* m : {&h, &p, &neg}) {
      const Matrix& grad = (m == &h) ? g.anchor : (m == &p) ? g.positive : g.negative;
      for (int r = 0; r < n; ++r) {
        for (int c = 0; c < d; ++c) {
          const double keep = (*m)(r, c);
          (*m)(r, c) = keep + eps;
          const double up = total_loss(h, p, neg, cfg);
          (*m)(r, c) = keep - eps;
          const double down = total_loss(h, p, neg, cfg);
          (*m)(r, c) = keep;
          const double numeric = (up - down) / (2 * eps);
          const double denom = std::max({std::abs(numeric), std::abs(grad(r, c)), 1e-6});
          max_err = std::max(max_err, std::abs(numeric - grad(r, c)) / denom);
        }
      }
    }
    CHECK(max_err < 1e-4);
  }
}
