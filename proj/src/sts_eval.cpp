#include "simgpt/sts_eval.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iostream>
#include <numeric>

#include "json.hpp"
#include "simgpt/annotation.hpp"
#include "simgpt/error.hpp"
#include "simgpt/text.hpp"

namespace simgpt {

std::vector<STSPair> load_sts_task(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::io, fmt::format("task file not found: '{}'", path.string()));
  }
  const std::string content = read_file(path);
  std::vector<STSPair> out;
  std::size_t line_number = 0;
  std::size_t start = 0;
  while (start < content.size()) {
    auto end = content.find('\n', start);
    if (end == std::string::npos) end = content.size();
    std::string_view line(content.data() + start, end - start);
    start = end + 1;
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (text::trim(line).empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string_view::npos || line.find('\t', t2 + 1) != std::string_view::npos) {
      throw Error(ErrorCode::schema,
                  fmt::format("{}: line {}: expected 3 tab-separated columns", path.string(), line_number));
    }
    const auto gold_text = text::trim(line.substr(0, t1));
    STSPair pair;
    const auto res = std::from_chars(gold_text.data(), gold_text.data() + gold_text.size(), pair.gold);
    if (res.ec != std::errc{} || res.ptr != gold_text.data() + gold_text.size() ||
        !(pair.gold >= 0.0 && pair.gold <= 5.0)) {
      throw Error(ErrorCode::schema, fmt::format("{}: line {}: gold score '{}' is not a number in [0, 5]",
                                                 path.string(), line_number, gold_text));
    }
    pair.sentence_a = std::string(text::trim(line.substr(t1 + 1, t2 - t1 - 1)));
    pair.sentence_b = std::string(text::trim(line.substr(t2 + 1)));
    if (pair.sentence_a.empty() || pair.sentence_b.empty()) {
      throw Error(ErrorCode::schema, fmt::format("{}: line {}: empty sentence", path.string(), line_number));
    }
    out.push_back(std::move(pair));
  }
  return out;
}

double scale_score(double cosine_value) {
  if (!(cosine_value >= -1.0 && cosine_value <= 1.0)) {
    throw Error(ErrorCode::invalid_argument,
                fmt::format("cosine {} outside [-1, 1]", cosine_value));
  }
  return (cosine_value + 1.0) * 2.5;
}

std::vector<double> fractional_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    // positions i..j-1 hold equal values; 1-based ranks i+1..j
    const double shared = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = shared;
    i = j;
  }
  return ranks;
}

namespace {

bool has_two_distinct(std::span<const double> v) {
  return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) != v.end();
}

}  // namespace

double spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw Error(ErrorCode::dimension_mismatch,
                fmt::format("spearman over {} and {} values", xs.size(), ys.size()));
  }
  if (xs.size() < 2) throw Error(ErrorCode::invalid_argument, "spearman needs at least two pairs");
  for (auto v : xs) {
    if (!std::isfinite(v)) throw Error(ErrorCode::non_finite, "non-finite value in spearman input");
  }
  for (auto v : ys) {
    if (!std::isfinite(v)) throw Error(ErrorCode::non_finite, "non-finite value in spearman input");
  }
  if (!has_two_distinct(xs) || !has_two_distinct(ys)) {
    throw Error(ErrorCode::constant_input, "spearman of a constant sequence is undefined");
  }
  const auto rx = fractional_ranks(xs);
  const auto ry = fractional_ranks(ys);
  // the mean of 1..n ranks is exactly (n + 1) / 2 regardless of ties
  const double mean = 0.5 * static_cast<double>(xs.size() + 1);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> predict_scores(const Encoder& encoder, std::span<const STSPair> pairs) {
  std::vector<std::string> a;
  std::vector<std::string> b;
  a.reserve(pairs.size());
  b.reserve(pairs.size());
  for (const auto& p : pairs) {
    a.push_back(p.sentence_a);
    b.push_back(p.sentence_b);
  }
  const Matrix ea = encoder.encode(a);
  const Matrix eb = encoder.encode(b);
  std::vector<double> out(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    try {
      out[i] = scale_score(cosine(ea.row(static_cast<Eigen::Index>(i)), eb.row(static_cast<Eigen::Index>(i))));
    } catch (const Error& e) {
      throw Error(e.code(), fmt::format("pair {}: {}", i + 1, e.what()));
    }
  }
  return out;
}

TaskResult evaluate_task(const Encoder& encoder, std::span<const STSPair> pairs) {
  if (pairs.size() < 2) throw Error(ErrorCode::invalid_argument, "a task needs at least two pairs");
  const auto predicted = predict_scores(encoder, pairs);
  std::vector<double> gold(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) gold[i] = pairs[i].gold;
  return {spearman(predicted, gold), pairs.size()};
}

const std::vector<std::string>& benchmark_task_order() {
  static const std::vector<std::string> order = {"STS12", "STS13", "STS14", "STS15",
                                                 "STS16", "STS-B", "SICK-R"};
  return order;
}

EvalReport evaluate_suite(const Encoder& encoder,
                          std::span<const std::pair<std::string, std::filesystem::path>> tasks) {
  std::vector<std::pair<std::string, std::filesystem::path>> ordered(tasks.begin(), tasks.end());
  const auto& known = benchmark_task_order();
  auto rank = [&](const std::string& name) {
    auto it = std::find(known.begin(), known.end(), name);
    return static_cast<std::size_t>(it - known.begin());
  };
  std::stable_sort(ordered.begin(), ordered.end(), [&](const auto& x, const auto& y) {
    const auto rx = rank(x.first);
    const auto ry = rank(y.first);
    if (rx != ry) return rx < ry;
    return rx == known.size() && x.first < y.first;
  });

  EvalReport report;
  double sum = 0.0;
  std::size_t ok = 0;
  for (const auto& [name, path] : ordered) {
    TaskReport t;
    t.task = name;
    try {
      const auto pairs = load_sts_task(path);
      t.pair_count = pairs.size();
      const auto r = evaluate_task(encoder, pairs);
      t.rho = r.rho;
      t.status = "ok";
      sum += r.rho;
      ++ok;
    } catch (const Error& e) {
      t.status = fmt::format("failed: {}", e.what());
      report.warnings.push_back(fmt::format("task {} failed and is excluded from Avg: {}", name, e.what()));
    }
    report.per_task.push_back(std::move(t));
  }
  if (ok > 0) report.average = sum / static_cast<double>(ok);
  return report;
}

std::string EvalReport::render_table() const {
  std::vector<std::string> header;
  std::vector<std::string> row;
  for (const auto& t : per_task) {
    header.push_back(t.task);
    row.push_back(t.rho ? fmt::format("{:.2f}", *t.rho * 100.0) : std::string("failed"));
  }
  header.emplace_back("Avg");
  row.push_back(average ? fmt::format("{:.2f}", *average * 100.0) : std::string("n/a"));
  std::string top;
  std::string bottom;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto width = std::max<std::size_t>({header[i].size(), row[i].size(), 6});
    if (i > 0) {
      top += "  ";
      bottom += "  ";
    }
    top += fmt::format("{:>{}}", header[i], width);
    bottom += fmt::format("{:>{}}", row[i], width);
  }
  return top + "\n" + bottom + "\n";
}

std::string EvalReport::render_records() const {
  std::string out;
  std::size_t total_pairs = 0;
  for (const auto& t : per_task) {
    nlohmann::ordered_json j;
    j["task"] = t.task;
    j["rho"] = t.rho ? nlohmann::ordered_json(*t.rho) : nlohmann::ordered_json(nullptr);
    j["pair_count"] = t.pair_count;
    j["status"] = t.status;
    out += j.dump() + "\n";
    if (t.rho) total_pairs += t.pair_count;
  }
  nlohmann::ordered_json avg;
  avg["task"] = "Avg";
  avg["rho"] = average ? nlohmann::ordered_json(*average) : nlohmann::ordered_json(nullptr);
  avg["pair_count"] = total_pairs;
  avg["status"] = average ? "ok" : "failed: no successful task";
  out += avg.dump() + "\n";
  return out;
}

IclEvaluation evaluate_icl(std::span<const std::optional<double>> predicted,
                           std::span<const STSPair> gold_pairs) {
  if (predicted.size() != gold_pairs.size()) {
    throw Error(ErrorCode::dimension_mismatch,
                fmt::format("{} predictions for {} gold pairs", predicted.size(), gold_pairs.size()));
  }
  IclEvaluation out;
  out.pair_count = predicted.size();
  std::vector<double> xs(predicted.size());
  std::vector<double> ys(predicted.size());
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i]) {
      xs[i] = *predicted[i];
    } else {
      xs[i] = kUnparsableScoreDefault;
      ++out.unparsable_count;
    }
    ys[i] = gold_pairs[i].gold;
  }
  out.rho = spearman(xs, ys);
  return out;
}

}  // namespace simgpt
