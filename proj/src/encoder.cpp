#include "simgpt/encoder.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <sstream>

#include "simgpt/error.hpp"
#include "simgpt/rng.hpp"
#include "simgpt/text.hpp"

namespace simgpt {

namespace {
constexpr std::string_view kMagic = "simgpt-reference-encoder v1";
}

ReferenceEncoder::ReferenceEncoder(std::vector<std::string> vocabulary, std::size_t dim,
                                   std::uint64_t seed)
    : vocab_(std::move(vocabulary)), dim_(dim), seed_(seed) {
  if (vocab_.empty()) throw Error(ErrorCode::invalid_argument, "encoder vocabulary is empty");
  if (dim_ < 2) throw Error(ErrorCode::invalid_argument, "encoder dimension must be >= 2");
  for (std::size_t i = 0; i < vocab_.size(); ++i) {
    const auto& tok = vocab_[i];
    if (tok.empty() || text::count_whitespace_tokens(tok) != 1 || text::trim(tok).size() != tok.size()) {
      throw Error(ErrorCode::invalid_argument, fmt::format("invalid vocabulary token '{}'", tok));
    }
    if (!index_.emplace(tok, i).second) {
      throw Error(ErrorCode::invalid_argument, fmt::format("duplicate vocabulary token '{}'", tok));
    }
  }
  params_.resize((vocab_.size() + 1) * dim_);
  Rng rng(seed_);
  for (auto& p : params_) p = rng.uniform(-0.1, 0.1);
}

std::vector<std::pair<std::size_t, double>> ReferenceEncoder::pooling_weights(std::string_view text) const {
  std::map<std::size_t, std::size_t> counts;
  std::size_t total = 0;
  for (const auto& tok : text::split_whitespace(text::to_lower_ascii(text))) {
    auto it = index_.find(tok);
    ++counts[it == index_.end() ? unknown_row() : it->second];
    ++total;
  }
  if (total == 0) return {{unknown_row(), 1.0}};
  std::vector<std::pair<std::size_t, double>> out;
  out.reserve(counts.size());
  for (const auto& [row, count] : counts) {
    out.emplace_back(row, static_cast<double>(count) / static_cast<double>(total));
  }
  return out;
}

Matrix ReferenceEncoder::encode(std::span<const std::string> texts) const {
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(texts.size()), static_cast<Eigen::Index>(dim_));
  for (std::size_t i = 0; i < texts.size(); ++i) {
    for (const auto& [row, w] : pooling_weights(texts[i])) {
      const double* src = params_.data() + row * dim_;
      for (std::size_t k = 0; k < dim_; ++k) {
        out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) += w * src[k];
      }
    }
  }
  return out;
}

void ReferenceEncoder::set_parameters(std::span<const double> values) {
  if (values.size() != params_.size()) {
    throw Error(ErrorCode::dimension_mismatch,
                fmt::format("expected {} parameters, got {}", params_.size(), values.size()));
  }
  std::copy(values.begin(), values.end(), params_.begin());
}

std::vector<double> ReferenceEncoder::backward(std::span<const std::string> texts,
                                               const Matrix& grad_embeddings) const {
  if (static_cast<std::size_t>(grad_embeddings.rows()) != texts.size() ||
      static_cast<std::size_t>(grad_embeddings.cols()) != dim_) {
    throw Error(ErrorCode::dimension_mismatch, "gradient shape does not match the encoded batch");
  }
  std::vector<double> grad(params_.size(), 0.0);
  for (std::size_t i = 0; i < texts.size(); ++i) {
    for (const auto& [row, w] : pooling_weights(texts[i])) {
      double* dst = grad.data() + row * dim_;
      for (std::size_t k = 0; k < dim_; ++k) {
        dst[k] += w * grad_embeddings(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
      }
    }
  }
  return grad;
}

void ReferenceEncoder::apply_gradient(std::span<const double> gradient, double learning_rate) {
  if (gradient.size() != params_.size()) {
    throw Error(ErrorCode::dimension_mismatch, "gradient length does not match the parameters");
  }
  for (std::size_t k = 0; k < params_.size(); ++k) params_[k] -= learning_rate * gradient[k];
}

std::string ReferenceEncoder::serialize() const {
  std::string out;
  out += kMagic;
  out += fmt::format("\ndim {}\nseed {}\nvocab {}\n", dim_, seed_, vocab_.size());
  for (const auto& tok : vocab_) {
    out += tok;
    out += '\n';
  }
  out += fmt::format("params {}\n", params_.size());
  for (std::size_t r = 0; r < params_.size() / dim_; ++r) {
    for (std::size_t k = 0; k < dim_; ++k) {
      if (k > 0) out += ' ';
      out += text::format_shortest(params_[r * dim_ + k]);
    }
    out += '\n';
  }
  return out;
}

ReferenceEncoder ReferenceEncoder::deserialize(std::string_view blob) {
  std::istringstream in{std::string(blob)};
  auto fail = [](const std::string& what) -> ReferenceEncoder {
    throw Error(ErrorCode::schema, "encoder checkpoint: " + what);
  };
  std::string line;
  if (!std::getline(in, line) || line != kMagic) return fail("unknown format header");
  std::string key;
  std::size_t dim = 0;
  std::uint64_t seed = 0;
  std::size_t vocab_size = 0;
  if (!(in >> key >> dim) || key != "dim") return fail("missing dim");
  if (!(in >> key >> seed) || key != "seed") return fail("missing seed");
  if (!(in >> key >> vocab_size) || key != "vocab") return fail("missing vocab");
  std::getline(in, line);
  std::vector<std::string> vocab(vocab_size);
  for (auto& tok : vocab) {
    if (!std::getline(in, tok)) return fail("truncated vocabulary");
  }
  std::size_t count = 0;
  if (!(in >> key >> count) || key != "params") return fail("missing params");
  ReferenceEncoder enc(std::move(vocab), dim, seed);
  if (count != enc.params_.size()) return fail("parameter count does not match vocab and dim");
  std::vector<double> values(count);
  for (auto& v : values) {
    std::string tok;
    if (!(in >> tok)) return fail("truncated parameters");
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) return fail("bad number '" + tok + "'");
  }
  enc.set_parameters(values);
  return enc;
}

void ReferenceEncoder::save(const std::filesystem::path& path) const {
  write_file_atomic(path, serialize());
}

ReferenceEncoder ReferenceEncoder::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::io, fmt::format("encoder checkpoint not found: '{}'", path.string()));
  }
  return deserialize(read_file(path));
}

std::vector<std::string> build_vocabulary(std::span<const TrainingTriplet> data) {
  std::set<std::string> tokens;
  for (const auto& t : data) {
    for (const auto* s : {&t.origin, &t.positive, &t.negative}) {
      for (auto& tok : text::split_whitespace(text::to_lower_ascii(*s))) tokens.insert(std::move(tok));
    }
  }
  return {tokens.begin(), tokens.end()};
}

}  // namespace simgpt
