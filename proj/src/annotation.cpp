#include "simgpt/annotation.hpp"

#include <fmt/format.h>

#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <regex>

#include "json.hpp"
#include "simgpt/detail/ordered_pool.hpp"
#include "simgpt/error.hpp"
#include "simgpt/text.hpp"

namespace simgpt {

namespace {

std::vector<std::string_view> lines_of(std::string_view raw) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  for (;;) {
    const auto nl = raw.find('\n', start);
    lines.push_back(raw.substr(start, nl == std::string_view::npos ? nl : nl - start));
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return lines;
}

struct NumberedLine {
  int number = 0;
  std::string_view text;
};

// "<digits>. <text>"; the dot must be followed by whitespace or end of line.
std::optional<NumberedLine> parse_numbered(std::string_view line) {
  line = text::trim(line);
  std::size_t i = 0;
  while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
  if (i == 0 || i > 3 || i >= line.size() || line[i] != '.') return std::nullopt;
  if (i + 1 < line.size() && line[i + 1] != ' ' && line[i + 1] != '\t') return std::nullopt;
  NumberedLine out;
  std::from_chars(line.data(), line.data() + i, out.number);
  out.text = text::trim(line.substr(i + 1));
  return out;
}

ParseOutcome malformed(std::string reason) {
  ParseOutcome out;
  out.kind = ParseKind::malformed;
  out.reason = std::move(reason);
  return out;
}

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
  return s;
}

// Normalized tokens with contractions split off: "isn't" -> "is" "n't".
std::vector<std::string> negation_tokens(std::string_view sentence) {
  const std::string norm = replace_all(text::normalize_sentence(sentence), "\xE2\x80\x99", "'");
  std::vector<std::string> out;
  for (auto& tok : text::split_whitespace(norm)) {
    if (tok == "cannot") {
      out.emplace_back("can");
      out.emplace_back("not");
    } else if (tok == "can't") {
      out.emplace_back("can");
      out.emplace_back("n't");
    } else if (tok == "won't") {
      out.emplace_back("will");
      out.emplace_back("n't");
    } else if (tok == "shan't") {
      out.emplace_back("shall");
      out.emplace_back("n't");
    } else if (tok.size() > 3 && tok.compare(tok.size() - 3, 3, "n't") == 0) {
      out.push_back(tok.substr(0, tok.size() - 3));
      out.emplace_back("n't");
    } else {
      out.push_back(std::move(tok));
    }
  }
  return out;
}

bool is_negation_token(std::string_view tok) {
  return tok == "not" || tok == "n't" || tok == "no" || tok == "never";
}

}  // namespace

ParseOutcome parse_triplet_output(std::string_view raw) {
  std::vector<std::string_view> content;
  for (auto line : lines_of(raw)) {
    if (!text::trim(line).empty()) content.push_back(line);
  }
  if (content.empty()) return malformed("wrong_line_count");

  std::vector<std::optional<NumberedLine>> parsed;
  std::size_t numbered = 0;
  for (auto line : content) {
    parsed.push_back(parse_numbered(line));
    if (parsed.back()) ++numbered;
  }
  if (numbered > 0 && numbered < content.size()) return malformed("extra_prose");
  if (content.size() != 2) return malformed("wrong_line_count");
  if (numbered == 0 || parsed[0]->number != 1 || parsed[1]->number != 2) {
    return malformed("missing_numbering");
  }
  if (parsed[0]->text.empty() || parsed[1]->text.empty()) return malformed("empty_sentence");

  ParseOutcome out;
  out.kind = ParseKind::triplet;
  out.similar = std::string(parsed[0]->text);
  out.dissimilar = std::string(parsed[1]->text);
  return out;
}

ParseOutcome parse_score_output(std::string_view raw) {
  static const std::regex number(R"([-+]?(?:\d+(?:\.\d*)?|\.\d+))");
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_search(raw.begin(), raw.end(), m, number)) return malformed("score_unparsable");
  std::string token = m.str();
  if (!token.empty() && token.front() == '+') token.erase(0, 1);
  double value = 0.0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
  if (res.ec != std::errc{}) return malformed("score_unparsable");
  ParseOutcome out;
  out.kind = ParseKind::score;
  out.score = std::clamp(value, 0.0, 5.0);
  return out;
}

bool is_bare_negation(std::string_view origin, std::string_view dissimilar) {
  auto a = negation_tokens(origin);
  auto b = negation_tokens(dissimilar);
  if (a.size() + 1 == b.size()) {
    std::swap(a, b);
  } else if (b.size() + 1 != a.size()) {
    return false;
  }
  // a is the longer sequence
  std::size_t k = 0;
  while (k < b.size() && a[k] == b[k]) ++k;
  if (!is_negation_token(a[k])) return false;
  for (std::size_t i = k; i < b.size(); ++i) {
    if (a[i + 1] != b[i]) return false;
  }
  return true;
}

Validation validate_triplet(std::string_view origin, std::string_view similar,
                            std::string_view dissimilar, SeenSet& seen) {
  const auto o = text::normalize_sentence(origin);
  const auto s = text::normalize_sentence(similar);
  const auto d = text::normalize_sentence(dissimilar);
  if (s == o || d == o) return {false, "copy_of_origin"};
  if (s == d) return {false, "similar_equals_dissimilar"};
  if (seen.contains(s) || seen.contains(d)) return {false, "duplicate_sentence"};
  if (is_bare_negation(origin, dissimilar)) return {false, "bare_negation"};
  seen.insert(s);
  seen.insert(d);
  return {true, {}};
}

std::vector<AnnotatedTriplet> AnnotationResult::accepted_records() const {
  std::vector<AnnotatedTriplet> out;
  for (const auto& r : records) {
    if (r.status == TripletStatus::accepted) out.push_back(r);
  }
  return out;
}

std::vector<AnnotatedTriplet> AnnotationResult::rejected_records() const {
  std::vector<AnnotatedTriplet> out;
  for (const auto& r : records) {
    if (r.status == TripletStatus::rejected) out.push_back(r);
  }
  return out;
}

namespace {

std::string checkpoint_key(Genre genre, std::string_view source_id) {
  return fmt::format("{}\t{}", to_string(genre), source_id);
}

// Replays the checkpoint log. A torn final line (no terminating newline or
// unparsable) is dropped and the file truncated to the last complete record.
std::map<std::string, AnnotatedTriplet> replay_checkpoint(const std::filesystem::path& path) {
  std::map<std::string, AnnotatedTriplet> out;
  if (!std::filesystem::exists(path)) return out;
  const std::string content = read_file(path);
  std::size_t start = 0;
  std::size_t good_end = 0;
  std::size_t line_number = 0;
  while (start < content.size()) {
    const auto nl = content.find('\n', start);
    const bool complete_line = nl != std::string::npos;
    const std::string_view line(content.data() + start,
                                (complete_line ? nl : content.size()) - start);
    ++line_number;
    try {
      if (!complete_line) throw Error(ErrorCode::schema, "unterminated record");
      const auto j = nlohmann::ordered_json::parse(line);
      auto t = parse_triplet(j.at("triplet").dump(), line_number);
      out[checkpoint_key(t.genre, j.at("source_id").get<std::string>())] = std::move(t);
    } catch (const std::exception& e) {
      const bool last = !complete_line || nl + 1 == content.size();
      if (!last) {
        throw Error(ErrorCode::schema,
                    fmt::format("{}: line {}: corrupt checkpoint record: {}", path.string(), line_number, e.what()));
      }
      std::filesystem::resize_file(path, good_end);
      break;
    }
    start = nl + 1;
    good_end = start;
  }
  return out;
}

struct Completion {
  std::string raw;
  bool transport_failed = false;
};

}  // namespace

AnnotationResult annotate_corpus(std::span<const SourceSentence> sentences, const PromptSpec& spec,
                                 const LLMConfig& config, const AnnotateOptions& options) {
  ChatClient client(config);
  std::map<std::string, AnnotatedTriplet> replayed;
  std::ofstream log;
  if (options.checkpoint_path) {
    replayed = replay_checkpoint(*options.checkpoint_path);
    if (options.checkpoint_path->has_parent_path()) {
      std::filesystem::create_directories(options.checkpoint_path->parent_path());
    }
    log.open(*options.checkpoint_path, std::ios::binary | std::ios::app);
    if (!log) {
      throw Error(ErrorCode::io,
                  fmt::format("cannot open checkpoint '{}'", options.checkpoint_path->string()));
    }
  }

  std::vector<bool> needs_work(sentences.size());
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    needs_work[i] = !replayed.contains(checkpoint_key(sentences[i].genre, sentences[i].source_id));
  }

  AnnotationResult result;
  result.records.reserve(sentences.size());
  SeenSet seen;
  std::size_t committed = 0;

  auto work = [&](std::size_t i) {
    const std::string prompt = render_annotation_prompt(spec, sentences[i].text);
    try {
      return Completion{client.complete(prompt), false};
    } catch (const TransportError& e) {
      return Completion{e.what(), true};
    }
  };

  auto commit = [&](std::size_t i, std::optional<Completion> completion) {
    const auto& sentence = sentences[i];
    AnnotatedTriplet record;
    if (!completion) {
      record = replayed.at(checkpoint_key(sentence.genre, sentence.source_id));
      if (record.status == TripletStatus::accepted) {
        seen.insert(text::normalize_sentence(record.similar));
        seen.insert(text::normalize_sentence(record.dissimilar));
      }
      ++result.replayed;
    } else {
      record.origin = sentence.text;
      record.genre = sentence.genre;
      record.raw_llm_output = completion->raw;
      if (completion->transport_failed) {
        record.status = TripletStatus::rejected;
        record.reject_reason = "transport";
      } else {
        const auto parsed = parse_triplet_output(completion->raw);
        if (parsed.kind != ParseKind::triplet) {
          record.status = TripletStatus::rejected;
          record.reject_reason = parsed.reason;
        } else {
          record.similar = parsed.similar;
          record.dissimilar = parsed.dissimilar;
          const auto verdict = validate_triplet(record.origin, record.similar, record.dissimilar, seen);
          record.status = verdict.accepted ? TripletStatus::accepted : TripletStatus::rejected;
          if (!verdict.accepted) record.reject_reason = verdict.reason;
        }
      }
      if (log.is_open()) {
        nlohmann::ordered_json line;
        line["source_id"] = sentence.source_id;
        line["triplet"] = nlohmann::ordered_json::parse(serialize_triplet(record));
        log << line.dump() << '\n';
        log.flush();
      }
    }
    if (record.status == TripletStatus::accepted) {
      ++result.accepted;
    } else {
      ++result.rejected;
    }
    result.records.push_back(std::move(record));
    ++committed;
    if (options.on_commit) options.on_commit(committed);
  };

  detail::run_in_order<Completion>(needs_work, static_cast<std::size_t>(config.max_in_flight), work,
                                   commit);
  result.requests_issued = client.requests_sent();
  return result;
}

ParseOutcome score_pair_icl(std::string_view sentence_a, std::string_view sentence_b,
                            std::span<const IclShot> shots, ChatClient& client) {
  const std::string prompt = render_icl_prompt(shots, sentence_a, sentence_b);
  return parse_score_output(client.complete(prompt));
}

}  // namespace simgpt
