#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace simgpt {

enum class Genre { caption, question, multigenre };

std::string_view to_string(Genre genre);
// Accepts the canonical names plus "captions", "questions", "multi-genre".
Genre parse_genre(std::string_view name);

struct SourceSentence {
  std::string text;
  Genre genre = Genre::caption;
  std::string source_id;

  bool operator==(const SourceSentence&) const = default;
};

enum class TripletStatus { accepted, rejected };

std::string_view to_string(TripletStatus status);

// One (origin, similar, dissimilar) annotation, kept with the raw model
// output so rejected records stay auditable.
struct AnnotatedTriplet {
  std::string origin;
  std::string similar;
  std::string dissimilar;
  Genre genre = Genre::caption;
  TripletStatus status = TripletStatus::accepted;
  std::optional<std::string> reject_reason;
  std::string raw_llm_output;

  bool operator==(const AnnotatedTriplet&) const = default;
};

struct CorpusStats {
  std::size_t sentence_count = 0;
  // Unset when sentence_count == 0.
  std::optional<std::size_t> max_length;
  std::optional<std::size_t> min_length;
  std::optional<double> mean_tokens;

  bool operator==(const CorpusStats&) const = default;
};

struct NliRecord {
  std::string premise;
  std::string entailment_hypothesis;
  std::string contradiction_hypothesis;

  bool operator==(const NliRecord&) const = default;
};

struct TrainingTriplet {
  std::string origin;
  std::string positive;
  std::string negative;

  bool operator==(const TrainingTriplet&) const = default;
};

struct LoadResult {
  std::vector<SourceSentence> sentences;
  std::size_t skipped_invalid = 0;  // lines dropped for undecodable bytes
};

// One sentence per non-blank line, trimmed, in file order. source_id is
// "<file name>:<1-based line>".
LoadResult load_sources(const std::filesystem::path& path, Genre genre);

// k distinct elements drawn uniformly without replacement; the returned
// elements keep their relative input order.
std::vector<SourceSentence> sample_subset(std::span<const SourceSentence> sentences,
                                          std::size_t k, std::uint64_t seed);

CorpusStats compute_stats(std::span<const std::string> sentences);
CorpusStats compute_stats(std::span<const SourceSentence> sentences);

// "count, max, min, mean" with the mean at one decimal; empty cells when
// the corpus is empty.
std::string format_stats_row(const CorpusStats& stats);
std::string render_stats_table(std::span<const std::pair<std::string, CorpusStats>> rows);

std::string serialize_triplet(const AnnotatedTriplet& triplet);
AnnotatedTriplet parse_triplet(std::string_view line, std::size_t line_number);
void write_triplets(std::span<const AnnotatedTriplet> triplets, const std::filesystem::path& path);
std::vector<AnnotatedTriplet> read_triplets(const std::filesystem::path& path);

// Tab-separated premise / entailment / contradiction, no header.
std::vector<NliRecord> load_nli(const std::filesystem::path& path);

// GPT block then NLI block, then a seeded shuffle of the concatenation.
std::vector<TrainingTriplet> build_training_set(std::span<const AnnotatedTriplet> triplets,
                                                std::span<const NliRecord> nli,
                                                bool include_nli, std::uint64_t seed);

// Writes to a sibling temp file and renames over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

}  // namespace simgpt
