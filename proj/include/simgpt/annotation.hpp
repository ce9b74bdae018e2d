#pragma once

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "simgpt/corpus.hpp"
#include "simgpt/prompt.hpp"

namespace simgpt {

// Decoding parameters and transport settings for an OpenAI-compatible
// chat-completions endpoint. Defaults are the annotation settings: gpt-4,
// greedy decoding, no penalties, 4096 max tokens.
struct LLMConfig {
  std::string model_name = "gpt-4";
  double temperature = 0.0;
  double top_p = 1.0;
  double frequency_penalty = 0.0;
  double presence_penalty = 0.0;
  int max_tokens = 4096;
  std::string endpoint_url = "https://api.openai.com/v1/chat/completions";
  int max_retries = 3;
  int max_in_flight = 1;
  int backoff_initial_ms = 500;
  int request_timeout_s = 120;

  void validate() const;
  bool operator==(const LLMConfig&) const = default;
};

inline constexpr const char* kApiKeyEnv = "SIMGPT_API_KEY";

// Sends each prompt as a single user message. Transient failures (429, 5xx,
// no response) are retried with exponential backoff; 401/403 fail at once.
// Safe to call from several threads.
class ChatClient {
 public:
  explicit ChatClient(LLMConfig config);
  ChatClient(LLMConfig config, std::optional<std::string> api_key);

  std::string complete(std::string_view prompt);

  const LLMConfig& config() const { return config_; }
  std::size_t requests_sent() const { return requests_.load(); }

 private:
  LLMConfig config_;
  std::optional<std::string> api_key_;
  std::string base_url_;
  std::string path_;
  std::atomic<std::size_t> requests_{0};
};

std::string complete(std::string_view prompt, const LLMConfig& config);

enum class ParseKind { triplet, score, malformed };

struct ParseOutcome {
  ParseKind kind = ParseKind::malformed;
  std::string similar;
  std::string dissimilar;
  double score = 0.0;
  // wrong_line_count | missing_numbering | empty_sentence | extra_prose |
  // score_unparsable
  std::string reason;
};

ParseOutcome parse_triplet_output(std::string_view raw);

// First decimal number in the completion, clamped to [0, 5].
ParseOutcome parse_score_output(std::string_view raw);

struct Validation {
  bool accepted = false;
  // copy_of_origin | similar_equals_dissimilar | duplicate_sentence | bare_negation
  std::string reason;
};

using SeenSet = std::unordered_set<std::string>;

// True when `dissimilar` is `origin` with exactly one of {not, n't, no, never}
// inserted or removed.
bool is_bare_negation(std::string_view origin, std::string_view dissimilar);

// On acceptance both generated sentences (normalized) are added to `seen`.
Validation validate_triplet(std::string_view origin, std::string_view similar,
                            std::string_view dissimilar, SeenSet& seen);

struct AnnotateOptions {
  // Append-only outcome log keyed by (genre, source_id). Existing records are
  // replayed and their sentences are not re-queried.
  std::optional<std::filesystem::path> checkpoint_path;
  // Called after each committed outcome with the number committed so far in
  // this run.
  std::function<void(std::size_t)> on_commit;
};

struct AnnotationResult {
  std::vector<AnnotatedTriplet> records;  // input order, accepted and rejected
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t requests_issued = 0;
  std::size_t replayed = 0;

  std::vector<AnnotatedTriplet> accepted_records() const;
  std::vector<AnnotatedTriplet> rejected_records() const;
};

// Outcomes are committed in input order regardless of completion order, with
// validation against one shared seen-set.
AnnotationResult annotate_corpus(std::span<const SourceSentence> sentences, const PromptSpec& spec,
                                 const LLMConfig& config, const AnnotateOptions& options = {});

inline constexpr double kUnparsableScoreDefault = 2.5;

ParseOutcome score_pair_icl(std::string_view sentence_a, std::string_view sentence_b,
                            std::span<const IclShot> shots, ChatClient& client);

}  // namespace simgpt
