#include "simgpt/prompt.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>

#include "json.hpp"
#include "simgpt/error.hpp"
#include "simgpt/text.hpp"

namespace simgpt {

std::string_view to_string(PromptVariant variant) {
  switch (variant) {
    case PromptVariant::default8: return "default8";
    case PromptVariant::caption16: return "caption16";
    case PromptVariant::caption_multigenre8: return "caption_multigenre8";
  }
  return "default8";
}

PromptVariant parse_prompt_variant(std::string_view name) {
  if (name == "default8") return PromptVariant::default8;
  if (name == "caption16") return PromptVariant::caption16;
  if (name == "caption_multigenre8") return PromptVariant::caption_multigenre8;
  throw Error(ErrorCode::invalid_argument, fmt::format("unknown few-shot variant '{}'", name));
}

PromptSpec::PromptSpec(Genre genre, std::string task_description,
                       std::vector<FewShotExample> examples)
    : genre_(genre), task_description_(std::move(task_description)), examples_(std::move(examples)) {
  if (examples_.empty()) {
    throw Error(ErrorCode::invalid_argument, "a prompt spec needs at least one few-shot example");
  }
  const auto& d = task_description_;
  if (d.find("definitely similar") == std::string::npos ||
      d.find("definitely dissimilar") == std::string::npos ||
      d.find("don't simply paraphrase or negate") == std::string::npos) {
    throw Error(ErrorCode::invalid_argument,
                "task description must carry the similar/dissimilar instructions and the "
                "anti-paraphrase note");
  }
  for (std::size_t i = 0; i < examples_.size(); ++i) {
    const auto& e = examples_[i];
    if (e.input_sentence.empty() || e.similar.empty() || e.dissimilar.empty()) {
      throw Error(ErrorCode::invalid_argument, fmt::format("few-shot example {} has an empty field", i));
    }
    if (e.similar == e.dissimilar) {
      throw Error(ErrorCode::invalid_argument,
                  fmt::format("few-shot example {}: similar equals dissimilar", i));
    }
  }
}

IclShot::IclShot(std::string a, std::string b, std::string authored_score)
    : sentence_a(std::move(a)), sentence_b(std::move(b)), score_text(std::move(authored_score)) {
  const char* first = score_text.data();
  const char* last = first + score_text.size();
  const auto res = std::from_chars(first, last, score);
  if (res.ec != std::errc{} || res.ptr != last || !std::isfinite(score)) {
    throw Error(ErrorCode::invalid_argument, fmt::format("invalid shot score '{}'", score_text));
  }
  if (score < 0.0 || score > 5.0) {
    throw Error(ErrorCode::invalid_argument, fmt::format("shot score {} outside [0, 5]", score_text));
  }
}

IclShot IclShot::from_score(std::string a, std::string b, double score) {
  return IclShot(std::move(a), std::move(b), text::format_shortest(score));
}

PromptSpec load_custom_prompt_spec(const std::filesystem::path& path, Genre genre) {
  const std::string content = read_file(path);
  std::vector<FewShotExample> examples;
  std::size_t line_number = 0;
  std::size_t start = 0;
  while (start < content.size()) {
    auto end = content.find('\n', start);
    if (end == std::string::npos) end = content.size();
    std::string_view line(content.data() + start, end - start);
    start = end + 1;
    ++line_number;
    if (text::trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      examples.push_back({j.at("input").get<std::string>(), j.at("similar").get<std::string>(),
                          j.at("dissimilar").get<std::string>()});
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::schema,
                  fmt::format("{}: line {}: invalid few-shot record: {}", path.string(), line_number, e.what()));
    }
  }
  return PromptSpec(genre, builtin_task_description(genre), std::move(examples));
}

std::string render_annotation_prompt(const PromptSpec& spec, std::string_view input_sentence) {
  if (text::trim(input_sentence).empty()) {
    throw Error(ErrorCode::invalid_argument, "input sentence is empty");
  }
  std::string out = spec.task_description();
  out += "\n\n";
  for (const auto& e : spec.examples()) {
    out += "Input: ";
    out += e.input_sentence;
    out += "\nOutput: \n1. ";
    out += e.similar;
    out += "\n2. ";
    out += e.dissimilar;
    out += "\n\n";
  }
  out += "Input: ";
  out += input_sentence;
  out += "\nOutput: ";
  return out;
}

std::string render_icl_prompt(std::span<const IclShot> shots, std::string_view sentence_a,
                              std::string_view sentence_b) {
  if (shots.empty()) throw Error(ErrorCode::invalid_argument, "in-context prompt needs at least one shot");
  std::string out = icl_task_description();
  out += "\n\n";
  for (const auto& s : shots) {
    out += fmt::format("Input: {}\n{}\nOutput: {}\n\n", s.sentence_a, s.sentence_b, s.score_text);
  }
  out += fmt::format("Input: {}\n{}\nOutput: ", sentence_a, sentence_b);
  return out;
}

}  // namespace simgpt
