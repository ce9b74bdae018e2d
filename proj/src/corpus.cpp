#include "simgpt/corpus.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "simgpt/error.hpp"
#include "simgpt/rng.hpp"
#include "simgpt/text.hpp"

namespace simgpt {

using ordered_json = nlohmann::ordered_json;

std::string_view to_string(Genre genre) {
  switch (genre) {
    case Genre::caption: return "caption";
    case Genre::question: return "question";
    case Genre::multigenre: return "multigenre";
  }
  return "caption";
}

Genre parse_genre(std::string_view name) {
  if (name == "caption" || name == "captions") return Genre::caption;
  if (name == "question" || name == "questions") return Genre::question;
  if (name == "multigenre" || name == "multi-genre") return Genre::multigenre;
  throw Error(ErrorCode::invalid_argument, fmt::format("unknown genre '{}'", name));
}

std::string_view to_string(TripletStatus status) {
  return status == TripletStatus::accepted ? "accepted" : "rejected";
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io, fmt::format("cannot write '{}'", tmp.string()));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::io, fmt::format("write failed for '{}'", tmp.string()));
  }
  std::filesystem::rename(tmp, path);
}

namespace {

// Splits on '\n' and drops a trailing '\r' per line. The final empty piece
// after a terminating newline is not returned.
std::vector<std::string_view> split_lines(std::string_view content) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    auto line = content.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

}  // namespace

LoadResult load_sources(const std::filesystem::path& path, Genre genre) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::io, fmt::format("source file not found: '{}'", path.string()));
  }
  const std::string content = read_file(path);
  const std::string name = path.filename().string();
  LoadResult result;
  std::size_t line_number = 0;
  for (auto line : split_lines(content)) {
    ++line_number;
    if (!text::is_valid_utf8(line)) {
      ++result.skipped_invalid;
      continue;
    }
    auto trimmed = text::trim(line);
    if (trimmed.empty()) continue;
    result.sentences.push_back(
        {std::string(trimmed), genre, fmt::format("{}:{}", name, line_number)});
  }
  if (result.skipped_invalid > 0) {
    std::cerr << fmt::format("warning: {}: skipped {} undecodable line(s)\n", path.string(),
                             result.skipped_invalid);
  }
  return result;
}

std::vector<SourceSentence> sample_subset(std::span<const SourceSentence> sentences,
                                          std::size_t k, std::uint64_t seed) {
  if (k > sentences.size()) {
    throw Error(ErrorCode::sample_too_large,
                fmt::format("sample size exceeds corpus ({} > {})", k, sentences.size()));
  }
  std::vector<std::size_t> index(sentences.size());
  std::iota(index.begin(), index.end(), std::size_t{0});
  Rng rng(seed);
  // partial Fisher-Yates: the first k slots become the sample
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(sentences.size() - i));
    std::swap(index[i], index[j]);
  }
  index.resize(k);
  std::sort(index.begin(), index.end());
  std::vector<SourceSentence> out;
  out.reserve(k);
  for (auto i : index) out.push_back(sentences[i]);
  return out;
}

CorpusStats compute_stats(std::span<const std::string> sentences) {
  CorpusStats stats;
  stats.sentence_count = sentences.size();
  if (sentences.empty()) return stats;
  std::size_t lo = SIZE_MAX;
  std::size_t hi = 0;
  std::size_t total = 0;
  for (const auto& s : sentences) {
    const auto n = text::count_whitespace_tokens(s);
    lo = std::min(lo, n);
    hi = std::max(hi, n);
    total += n;
  }
  stats.min_length = lo;
  stats.max_length = hi;
  stats.mean_tokens = static_cast<double>(total) / static_cast<double>(sentences.size());
  return stats;
}

CorpusStats compute_stats(std::span<const SourceSentence> sentences) {
  std::vector<std::string> texts;
  texts.reserve(sentences.size());
  for (const auto& s : sentences) texts.push_back(s.text);
  return compute_stats(texts);
}

std::string format_stats_row(const CorpusStats& stats) {
  if (stats.sentence_count == 0 || !stats.mean_tokens) {
    return fmt::format("{}, , , ", stats.sentence_count);
  }
  return fmt::format("{}, {}, {}, {:.1f}", stats.sentence_count, *stats.max_length,
                     *stats.min_length, *stats.mean_tokens);
}

std::string render_stats_table(std::span<const std::pair<std::string, CorpusStats>> rows) {
  std::size_t name_width = 4;
  for (const auto& [name, _] : rows) name_width = std::max(name_width, name.size());
  std::string out = fmt::format("{:<{}}  {:>15}  {:>10}  {:>10}  {:>11}\n", "Data", name_width,
                                "Sentence Number", "Max Length", "Min Length", "Mean Tokens");
  for (const auto& [name, s] : rows) {
    if (s.sentence_count == 0) {
      out += fmt::format("{:<{}}  {:>15}  {:>10}  {:>10}  {:>11}\n", name, name_width, 0, "", "",
                         "");
    } else {
      out += fmt::format("{:<{}}  {:>15}  {:>10}  {:>10}  {:>11.1f}\n", name, name_width,
                         s.sentence_count, *s.max_length, *s.min_length, *s.mean_tokens);
    }
  }
  return out;
}

std::string serialize_triplet(const AnnotatedTriplet& t) {
  ordered_json j;
  j["origin"] = t.origin;
  j["similar"] = t.similar;
  j["dissimilar"] = t.dissimilar;
  j["genre"] = std::string(to_string(t.genre));
  j["status"] = std::string(to_string(t.status));
  j["reject_reason"] = t.reject_reason ? ordered_json(*t.reject_reason) : ordered_json(nullptr);
  j["raw_llm_output"] = t.raw_llm_output;
  try {
    return j.dump();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::schema, fmt::format("cannot serialize triplet: {}", e.what()));
  }
}

namespace {

std::string require_string(const ordered_json& j, const char* key, std::size_t line_number) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw Error(ErrorCode::schema,
                fmt::format("line {}: field '{}' missing or not a string", line_number, key));
  }
  return it->get<std::string>();
}

}  // namespace

AnnotatedTriplet parse_triplet(std::string_view line, std::size_t line_number) {
  ordered_json j;
  try {
    j = ordered_json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::schema, fmt::format("line {}: invalid record: {}", line_number, e.what()));
  }
  if (!j.is_object()) {
    throw Error(ErrorCode::schema, fmt::format("line {}: record is not an object", line_number));
  }
  AnnotatedTriplet t;
  t.origin = require_string(j, "origin", line_number);
  t.similar = require_string(j, "similar", line_number);
  t.dissimilar = require_string(j, "dissimilar", line_number);
  t.raw_llm_output = require_string(j, "raw_llm_output", line_number);
  try {
    t.genre = parse_genre(require_string(j, "genre", line_number));
  } catch (const Error& e) {
    throw Error(ErrorCode::schema, fmt::format("line {}: {}", line_number, e.what()));
  }
  const auto status = require_string(j, "status", line_number);
  if (status == "accepted") {
    t.status = TripletStatus::accepted;
  } else if (status == "rejected") {
    t.status = TripletStatus::rejected;
  } else {
    throw Error(ErrorCode::schema, fmt::format("line {}: unknown status '{}'", line_number, status));
  }
  auto reason = j.find("reject_reason");
  if (reason == j.end()) {
    throw Error(ErrorCode::schema, fmt::format("line {}: field 'reject_reason' missing", line_number));
  }
  if (reason->is_string()) {
    t.reject_reason = reason->get<std::string>();
  } else if (!reason->is_null()) {
    throw Error(ErrorCode::schema,
                fmt::format("line {}: 'reject_reason' must be a string or null", line_number));
  }
  if (t.status == TripletStatus::accepted) {
    if (t.origin.empty() || t.similar.empty() || t.dissimilar.empty()) {
      throw Error(ErrorCode::schema,
                  fmt::format("line {}: accepted triplet with an empty sentence", line_number));
    }
    const auto o = text::normalize_sentence(t.origin);
    const auto s = text::normalize_sentence(t.similar);
    const auto d = text::normalize_sentence(t.dissimilar);
    if (s == o || d == o || s == d) {
      throw Error(ErrorCode::schema,
                  fmt::format("line {}: accepted triplet repeats a sentence", line_number));
    }
  }
  return t;
}

void write_triplets(std::span<const AnnotatedTriplet> triplets, const std::filesystem::path& path) {
  std::string content;
  for (const auto& t : triplets) {
    content += serialize_triplet(t);
    content.push_back('\n');
  }
  write_file_atomic(path, content);
}

std::vector<AnnotatedTriplet> read_triplets(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::io, fmt::format("triplet store not found: '{}'", path.string()));
  }
  const std::string content = read_file(path);
  std::vector<AnnotatedTriplet> out;
  std::size_t line_number = 0;
  for (auto line : split_lines(content)) {
    ++line_number;
    if (text::trim(line).empty()) continue;
    try {
      out.push_back(parse_triplet(line, line_number));
    } catch (const Error& e) {
      throw Error(e.code(), fmt::format("{}: {}", path.string(), e.what()));
    }
  }
  return out;
}

std::vector<NliRecord> load_nli(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::io, fmt::format("NLI file not found: '{}'", path.string()));
  }
  const std::string content = read_file(path);
  std::vector<NliRecord> out;
  std::size_t line_number = 0;
  for (auto line : split_lines(content)) {
    ++line_number;
    if (text::trim(line).empty()) continue;
    std::vector<std::string_view> cols;
    std::size_t start = 0;
    for (;;) {
      const auto tab = line.find('\t', start);
      cols.push_back(line.substr(start, tab == std::string_view::npos ? tab : tab - start));
      if (tab == std::string_view::npos) break;
      start = tab + 1;
    }
    if (cols.size() != 3) {
      throw Error(ErrorCode::schema, fmt::format("{}: line {}: expected 3 tab-separated columns, got {}",
                                                 path.string(), line_number, cols.size()));
    }
    NliRecord r{std::string(text::trim(cols[0])), std::string(text::trim(cols[1])),
                std::string(text::trim(cols[2]))};
    if (r.premise.empty() || r.entailment_hypothesis.empty() || r.contradiction_hypothesis.empty()) {
      throw Error(ErrorCode::schema,
                  fmt::format("{}: line {}: empty NLI field", path.string(), line_number));
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<TrainingTriplet> build_training_set(std::span<const AnnotatedTriplet> triplets,
                                                std::span<const NliRecord> nli,
                                                bool include_nli, std::uint64_t seed) {
  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < triplets.size(); ++i) {
    if (triplets[i].status != TripletStatus::accepted) bad.push_back(i);
  }
  if (!bad.empty()) {
    throw Error(ErrorCode::rejected_in_training_set,
                fmt::format("rejected triplets at indices [{}]", fmt::join(bad, ", ")));
  }
  std::vector<TrainingTriplet> out;
  out.reserve(triplets.size() + (include_nli ? nli.size() : 0));
  for (const auto& t : triplets) out.push_back({t.origin, t.similar, t.dissimilar});
  if (include_nli) {
    for (const auto& r : nli) {
      out.push_back({r.premise, r.entailment_hypothesis, r.contradiction_hypothesis});
    }
  }
  Rng rng(seed);
  rng.shuffle(out);
  return out;
}

}  // namespace simgpt
