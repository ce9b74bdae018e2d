#include "simgpt/pipeline.hpp"

#include <fmt/format.h>

#include <filesystem>
#include <ostream>

#include "json.hpp"
#include "simgpt/detail/ordered_pool.hpp"
#include "simgpt/encoder.hpp"
#include "simgpt/error.hpp"
#include "simgpt/prompt.hpp"
#include "simgpt/text.hpp"

namespace simgpt {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string genre_label(Genre g) {
  switch (g) {
    case Genre::caption: return "Captions";
    case Genre::question: return "Questions";
    case Genre::multigenre: return "Multi-genre Sentences";
  }
  return "?";
}

std::vector<SourceSentence> load_genre(const PipelineConfig& config, Genre genre,
                                       std::size_t* skipped) {
  const auto path = config.path(std::string(to_string(genre)));
  auto loaded = load_sources(path, genre);
  if (skipped) *skipped += loaded.skipped_invalid;
  auto it = config.sample_sizes.find(std::string(to_string(genre)));
  if (it == config.sample_sizes.end()) return std::move(loaded.sentences);
  return sample_subset(loaded.sentences, it->second, config.train.seed);
}

PromptSpec prompt_for(const PipelineConfig& config, Genre genre) {
  if (config.few_shot_file) {
    fs::path p(*config.few_shot_file);
    if (p.is_relative() && !config.base_dir.empty()) p = config.base_dir / p;
    return load_custom_prompt_spec(p, genre);
  }
  const auto variant = parse_prompt_variant(config.few_shot_variant);
  if (genre == Genre::caption) return builtin_prompt_spec(genre, variant);
  return builtin_prompt_spec(genre, PromptVariant::default8);
}

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

void write_output(const fs::path& p, std::string_view content) {
  ensure_parent(p);
  write_file_atomic(p, content);
}

std::vector<std::pair<std::string, fs::path>> eval_task_paths(const PipelineConfig& config) {
  std::vector<std::pair<std::string, fs::path>> tasks;
  for (const auto& [name, file] : config.eval_tasks) {
    fs::path p(file);
    if (p.is_relative() && !config.base_dir.empty()) p = config.base_dir / p;
    tasks.emplace_back(name, p);
  }
  return tasks;
}

}  // namespace

IngestSummary cmd_ingest(const PipelineConfig& config, std::ostream& out) {
  IngestSummary summary;
  for (Genre g : config.sources_enabled) {
    if (!config.has_path(std::string(to_string(g)))) continue;
    const auto sentences = load_genre(config, g, &summary.skipped_invalid);
    summary.rows.emplace_back(genre_label(g), compute_stats(sentences));
  }
  if (summary.rows.empty()) throw Error(ErrorCode::config, "no enabled source has a configured path");
  const auto table = render_stats_table(summary.rows);
  out << table;
  if (summary.skipped_invalid > 0) {
    out << fmt::format("skipped {} invalid UTF-8 line(s)\n", summary.skipped_invalid);
  }
  write_output(config.path("stats"), table);
  return summary;
}

AnnotateSummary cmd_annotate(const PipelineConfig& config, bool resume, std::ostream& out) {
  config.llm.validate();
  const auto log = config.path("annotation_log");
  const auto store = config.path("triplets");
  const auto rejects = config.path("rejects");

  // Resolve every input before any request goes out.
  std::vector<std::pair<Genre, std::vector<SourceSentence>>> inputs;
  std::vector<PromptSpec> specs;
  std::size_t skipped = 0;
  for (Genre g : config.sources_enabled) {
    inputs.emplace_back(g, load_genre(config, g, &skipped));
    specs.push_back(prompt_for(config, g));
  }
  if (inputs.empty()) throw Error(ErrorCode::config, "no sources enabled");
  if (!config.few_shot_file && config.few_shot_variant != "default8") {
    for (Genre g : config.sources_enabled) {
      if (g != Genre::caption) {
        out << fmt::format("note: few-shot variant {} applies to captions; {} use default8\n",
                           config.few_shot_variant, to_string(g));
      }
    }
  }

  if (!resume) fs::remove(log);
  ensure_parent(log);

  AnnotateSummary summary;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    AnnotateOptions options;
    options.checkpoint_path = log;
    auto result = annotate_corpus(inputs[k].second, specs[k], config.llm, options);
    summary.accepted += result.accepted;
    summary.rejected += result.rejected;
    summary.requests_issued += result.requests_issued;
    summary.replayed += result.replayed;
    for (auto& r : result.records) summary.records.push_back(std::move(r));
  }

  ensure_parent(store);
  write_triplets(summary.records, store);
  std::vector<AnnotatedTriplet> rejected;
  for (const auto& r : summary.records) {
    if (r.status == TripletStatus::rejected) rejected.push_back(r);
  }
  ensure_parent(rejects);
  write_triplets(rejected, rejects);

  out << fmt::format("accepted: {}\nrejected: {}\nrequests: {}\nreplayed: {}\n", summary.accepted,
                     summary.rejected, summary.requests_issued, summary.replayed);
  return summary;
}

TrainSummary cmd_train(const PipelineConfig& config, std::ostream& out) {
  const TrainConfig tc = config.train.to_train_config();
  LossConfig lc = config.loss;
  lc.validate();

  std::vector<AnnotatedTriplet> gpt;
  for (auto& r : read_triplets(config.path("triplets"))) {
    if (r.status == TripletStatus::accepted && config.source_enabled(r.genre)) gpt.push_back(std::move(r));
  }
  std::vector<NliRecord> nli;
  if (config.nli_enabled) {
    if (config.has_path("nli")) {
      nli = load_nli(config.path("nli"));
    } else {
      out << "warning: nli_enabled but paths.nli is not configured; training without NLI\n";
    }
  }
  const auto data = build_training_set(gpt, nli, !nli.empty(), tc.seed);
  if (data.empty()) throw Error(ErrorCode::invalid_argument, "training set is empty");
  if (data.size() < lc.batch_size) {
    out << fmt::format("warning: batch size {} exceeds training set size {}; using {}\n",
                       lc.batch_size, data.size(), data.size());
    lc.batch_size = data.size();
  }

  ReferenceEncoder encoder(build_vocabulary(data), config.train.dim, tc.seed);
  TrainSummary summary;
  summary.gpt_triplets = gpt.size();
  summary.nli_triplets = nli.size();
  summary.batch_size = lc.batch_size;
  summary.metrics = train(data, encoder, tc, lc);

  const auto ckpt = config.path("encoder");
  ensure_parent(ckpt);
  encoder.save(ckpt);
  std::string lines;
  for (const auto& m : summary.metrics) {
    json j;
    j["epoch"] = m.epoch;
    j["mean_loss"] = m.mean_loss;
    j["wall_time_s"] = m.wall_seconds;
    lines += j.dump() + "\n";
    out << fmt::format("epoch {}: mean_loss {:.6f} ({:.2f}s)\n", m.epoch, m.mean_loss, m.wall_seconds);
  }
  write_output(config.path("metrics"), lines);
  out << fmt::format("trained on {} triplets ({} generated, {} nli), batch {}\n", data.size(),
                     summary.gpt_triplets, summary.nli_triplets, summary.batch_size);
  return summary;
}

EvalReport cmd_eval(const PipelineConfig& config, std::ostream& out) {
  const auto ckpt = config.path("encoder");
  if (!fs::exists(ckpt)) {
    throw Error(ErrorCode::io,
                fmt::format("encoder checkpoint not found: '{}' (run train first)", ckpt.string()));
  }
  if (config.eval_tasks.empty()) throw Error(ErrorCode::config, "eval_tasks is empty");
  const auto encoder = ReferenceEncoder::load(ckpt);
  const auto tasks = eval_task_paths(config);
  EvalReport report = evaluate_suite(encoder, tasks);
  const auto table = report.render_table();
  out << table;
  for (const auto& w : report.warnings) out << "warning: " << w << "\n";
  write_output(config.path("report"), report.render_records());
  if (config.has_path("report_table")) write_output(config.path("report_table"), table);
  return report;
}

IclSummary cmd_icl_eval(const PipelineConfig& config, std::ostream& out) {
  config.llm.validate();
  const auto pairs = load_sts_task(config.path("icl_task"));
  const auto shots = builtin_icl_shots(config.icl_shots);
  const auto report_path = config.path("icl_report");
  ChatClient client(config.llm);

  IclSummary summary;
  summary.records.resize(pairs.size());
  std::vector<std::optional<double>> predicted(pairs.size());
  std::vector<bool> needs(pairs.size(), true);

  struct Outcome {
    std::string raw;
    bool transport_failed = false;
    std::string error;
  };
  detail::run_in_order<Outcome>(
      needs, config.llm.max_in_flight,
      [&](std::size_t i) {
        Outcome o;
        try {
          o.raw = client.complete(render_icl_prompt(shots, pairs[i].sentence_a, pairs[i].sentence_b));
        } catch (const TransportError& e) {
          o.transport_failed = true;
          o.error = e.what();
        }
        return o;
      },
      [&](std::size_t i, std::optional<Outcome> o) {
        auto& rec = summary.records[i];
        rec.sentence_a = pairs[i].sentence_a;
        rec.sentence_b = pairs[i].sentence_b;
        rec.gold = pairs[i].gold;
        if (o->transport_failed) {
          rec.status = "transport";
          out << fmt::format("warning: pair {}: {}\n", i + 1, o->error);
          return;
        }
        rec.raw_output = o->raw;
        const auto parsed = parse_score_output(o->raw);
        if (parsed.kind == ParseKind::score) {
          rec.score = parsed.score;
          rec.status = "ok";
          predicted[i] = parsed.score;
        } else {
          rec.status = parsed.reason;
        }
      });

  summary.evaluation = evaluate_icl(predicted, pairs);
  std::string lines;
  for (const auto& r : summary.records) {
    json j;
    j["sentence_a"] = r.sentence_a;
    j["sentence_b"] = r.sentence_b;
    j["gold"] = r.gold;
    j["score"] = r.score ? json(*r.score) : json(nullptr);
    j["status"] = r.status;
    j["raw_output"] = r.raw_output;
    lines += j.dump() + "\n";
  }
  json total;
  total["shots"] = config.icl_shots;
  total["rho"] = summary.evaluation.rho;
  total["unparsable_count"] = summary.evaluation.unparsable_count;
  total["pair_count"] = summary.evaluation.pair_count;
  lines += total.dump() + "\n";
  write_output(report_path, lines);
  out << fmt::format("shots: {}\nrho: {:.2f}\nunparsable_count: {}\npairs: {}\n", config.icl_shots,
                     summary.evaluation.rho * 100.0, summary.evaluation.unparsable_count,
                     summary.evaluation.pair_count);
  return summary;
}

std::vector<std::vector<Genre>> ablation_combinations() {
  const Genre c = Genre::caption, q = Genre::question, m = Genre::multigenre;
  return {{c}, {q}, {m}, {c, q}, {c, m}, {q, m}, {c, q, m}};
}

std::string ablation_label(const std::vector<Genre>& sources) {
  std::string label;
  for (Genre g : sources) {
    if (!label.empty()) label += " + ";
    label += genre_label(g);
  }
  return label;
}

std::string render_ablation_table(const std::vector<AblationRow>& rows) {
  std::vector<std::string> tasks;
  for (const auto& row : rows) {
    for (const auto& t : row.report.per_task) {
      if (std::find(tasks.begin(), tasks.end(), t.task) == tasks.end()) tasks.push_back(t.task);
    }
  }
  std::size_t name_width = 4;
  for (const auto& row : rows) name_width = std::max(name_width, row.name.size());
  std::string out = fmt::format("{:<{}}", "Data", name_width);
  for (const auto& t : tasks) out += fmt::format("  {:>7}", t);
  out += fmt::format("  {:>7}\n", "Avg");
  for (const auto& row : rows) {
    out += fmt::format("{:<{}}", row.name, name_width);
    for (const auto& t : tasks) {
      auto it = std::find_if(row.report.per_task.begin(), row.report.per_task.end(),
                             [&](const TaskReport& r) { return r.task == t; });
      if (it != row.report.per_task.end() && it->rho) {
        out += fmt::format("  {:>7.2f}", *it->rho * 100.0);
      } else {
        out += fmt::format("  {:>7}", "-");
      }
    }
    if (row.report.average) {
      out += fmt::format("  {:>7.2f}\n", *row.report.average * 100.0);
    } else {
      out += fmt::format("  {:>7}\n", "-");
    }
  }
  return out;
}

std::vector<AblationRow> cmd_ablate_sources(const PipelineConfig& config, std::ostream& out) {
  const fs::path dir = config.path("ablation_dir");
  std::vector<AblationRow> rows;
  for (const auto& combo : ablation_combinations()) {
    PipelineConfig sub = config;
    sub.sources_enabled = combo;
    std::string slug;
    for (Genre g : combo) slug += (slug.empty() ? "" : "+") + std::string(to_string(g));
    sub.paths["encoder"] = fs::absolute(dir / slug / "encoder.txt").string();
    sub.paths["metrics"] = fs::absolute(dir / slug / "metrics.jsonl").string();
    sub.paths["report"] = fs::absolute(dir / slug / "report.jsonl").string();
    sub.paths.erase("report_table");

    AblationRow row;
    row.name = ablation_label(combo);
    row.sources = combo;
    out << "== " << row.name << "\n";
    const auto t = cmd_train(sub, out);
    row.train_size = t.gpt_triplets + t.nli_triplets;
    row.report = cmd_eval(sub, out);
    rows.push_back(std::move(row));
  }
  const auto table = render_ablation_table(rows);
  out << table;
  std::string lines;
  for (const auto& row : rows) {
    json j;
    j["sources"] = row.name;
    j["train_size"] = row.train_size;
    j["avg"] = row.report.average ? json(*row.report.average) : json(nullptr);
    json per = json::object();
    for (const auto& r : row.report.per_task) per[r.task] = r.rho ? json(*r.rho) : json(nullptr);
    j["per_task"] = per;
    lines += j.dump() + "\n";
  }
  write_output(dir / "ablation.jsonl", lines);
  write_output(dir / "ablation.txt", table);
  return rows;
}

}  // namespace simgpt
