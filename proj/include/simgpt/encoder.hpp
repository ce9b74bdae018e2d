#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "simgpt/contrastive.hpp"
#include "simgpt/corpus.hpp"

namespace simgpt {

// Text-to-vector contract the trainer and evaluator work against. A
// transformer plug-in implements the same surface (and documents its
// pooling, e.g. [CLS]).
class Encoder {
 public:
  virtual ~Encoder() = default;

  // N texts -> N x dimension() matrix. Deterministic given the parameters.
  virtual Matrix encode(std::span<const std::string> texts) const = 0;
  virtual std::size_t dimension() const = 0;

  virtual std::span<const double> parameters() const = 0;
  virtual void set_parameters(std::span<const double> values) = 0;

  // Parameter gradient of a scalar whose gradient with respect to
  // encode(texts) is `grad_embeddings`.
  virtual std::vector<double> backward(std::span<const std::string> texts,
                                       const Matrix& grad_embeddings) const = 0;

  // One optimizer step from a parameter gradient.
  virtual void apply_gradient(std::span<const double> gradient, double learning_rate) = 0;

  virtual std::string pooling() const = 0;
};

// Token-embedding table with mean pooling over whitespace tokens
// (ASCII-lowercased). Unknown tokens share one learned vector, and empty text
// encodes as that vector. Plain gradient descent in apply_gradient.
class ReferenceEncoder final : public Encoder {
 public:
  ReferenceEncoder(std::vector<std::string> vocabulary, std::size_t dim, std::uint64_t seed);

  Matrix encode(std::span<const std::string> texts) const override;
  std::size_t dimension() const override { return dim_; }
  std::span<const double> parameters() const override { return params_; }
  void set_parameters(std::span<const double> values) override;
  std::vector<double> backward(std::span<const std::string> texts,
                               const Matrix& grad_embeddings) const override;
  void apply_gradient(std::span<const double> gradient, double learning_rate) override;
  std::string pooling() const override { return "mean over whitespace tokens"; }

  const std::vector<std::string>& vocabulary() const { return vocab_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t unknown_row() const { return vocab_.size(); }

  // Versioned text blob: header, vocabulary, and every parameter in
  // shortest round-trip form, so load reproduces encode() bit for bit.
  std::string serialize() const;
  static ReferenceEncoder deserialize(std::string_view blob);
  void save(const std::filesystem::path& path) const;
  static ReferenceEncoder load(const std::filesystem::path& path);

 private:
  // (row, weight) pairs whose weighted sum is the pooled embedding.
  std::vector<std::pair<std::size_t, double>> pooling_weights(std::string_view text) const;

  std::vector<std::string> vocab_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t dim_;
  std::uint64_t seed_;
  std::vector<double> params_;  // (|vocab| + 1) x dim, row-major, unknown row last
};

// Sorted distinct lowercased whitespace tokens over all three columns.
std::vector<std::string> build_vocabulary(std::span<const TrainingTriplet> data);

}  // namespace simgpt
