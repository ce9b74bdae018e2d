#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "simgpt/corpus.hpp"

namespace simgpt {

struct FewShotExample {
  std::string input_sentence;
  std::string similar;
  std::string dissimilar;

  bool operator==(const FewShotExample&) const = default;
};

enum class PromptVariant { default8, caption16, caption_multigenre8 };

std::string_view to_string(PromptVariant variant);
PromptVariant parse_prompt_variant(std::string_view name);

// Task description plus an ordered, non-empty few-shot block for one genre.
// The constructor enforces the invariants, so a spec with zero examples or
// a description lacking the similar/dissimilar instructions and the
// anti-paraphrase note cannot exist.
class PromptSpec {
 public:
  PromptSpec(Genre genre, std::string task_description, std::vector<FewShotExample> examples);

  Genre genre() const { return genre_; }
  const std::string& task_description() const { return task_description_; }
  const std::vector<FewShotExample>& examples() const { return examples_; }
  std::size_t shot_count() const { return examples_.size(); }

 private:
  Genre genre_;
  std::string task_description_;
  std::vector<FewShotExample> examples_;
};

// One scored pair for the in-context scoring baseline. `score_text` keeps the
// authored spelling ("5.0", "0.636") so rendering does not reformat it.
struct IclShot {
  std::string sentence_a;
  std::string sentence_b;
  double score = 0.0;
  std::string score_text;

  IclShot(std::string a, std::string b, std::string authored_score);
  static IclShot from_score(std::string a, std::string b, double score);
};

// Built-in annotation task descriptions, one per genre.
const std::string& builtin_task_description(Genre genre);
const std::string& icl_task_description();

PromptSpec builtin_prompt_spec(Genre genre, PromptVariant variant);

// 8, 16 or 32 shots.
std::vector<IclShot> builtin_icl_shots(int shots);

// Records with fields input / similar / dissimilar, one JSON object per line.
// The task description comes from the genre's built-in description.
PromptSpec load_custom_prompt_spec(const std::filesystem::path& path, Genre genre);

// <desc>\n\n, then per example "Input: <in>\nOutput: \n1. <sim>\n2. <dis>\n\n",
// then "Input: <x>\nOutput: " with no trailing newline.
std::string render_annotation_prompt(const PromptSpec& spec, std::string_view input_sentence);

// <desc>\n\n, then per shot "Input: <a>\n<b>\nOutput: <score>\n\n", then the
// query pair ending in "Output: ".
std::string render_icl_prompt(std::span<const IclShot> shots, std::string_view sentence_a,
                              std::string_view sentence_b);

}  // namespace simgpt
