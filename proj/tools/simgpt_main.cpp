#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "simgpt/config.hpp"
#include "simgpt/error.hpp"
#include "simgpt/pipeline.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mock_endpoint;
  std::optional<std::string> few_shot_variant;
  std::optional<std::string> sources;
  bool no_nli = false;
  bool resume = false;
  std::optional<int> shots;
};

simgpt::PipelineConfig resolve(const Overrides& o) {
  auto config = simgpt::load_config(o.config_path);
  if (o.seed) config.train.seed = *o.seed;
  if (o.mock_endpoint) config.llm.endpoint_url = *o.mock_endpoint;
  if (o.few_shot_variant) config.few_shot_variant = *o.few_shot_variant;
  if (o.sources) config.sources_enabled = simgpt::parse_source_list(*o.sources);
  if (o.no_nli) config.nli_enabled = false;
  if (o.shots) config.icl_shots = *o.shots;
  config.validate();
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sentence embeddings trained on LLM-annotated triplets"};
  app.require_subcommand(1);
  Overrides o;

  app.add_option("--config", o.config_path, "Pipeline config (JSON)")->required();
  app.add_option("--seed", o.seed, "Seed for sampling, shuffling and initialization");
  app.add_option("--mock-endpoint", o.mock_endpoint, "Send LLM requests to this URL instead");
  app.add_option("--few-shot-variant", o.few_shot_variant,
                 "default8 | caption16 | caption_multigenre8");
  app.add_option("--sources", o.sources, "Comma separated: caption,question,multigenre");
  app.add_flag("--no-nli", o.no_nli, "Train without the NLI triplets");

  auto* ingest = app.add_subcommand("ingest", "Load sources and print corpus statistics");
  auto* annotate = app.add_subcommand("annotate", "Generate triplets with the LLM");
  annotate->add_flag("--resume", o.resume, "Continue from the annotation log");
  auto* train = app.add_subcommand("train", "Train the encoder on the triplet store");
  auto* eval = app.add_subcommand("eval", "Evaluate the trained encoder on STS tasks");
  auto* icl = app.add_subcommand("icl-eval", "Score STS pairs directly with the LLM");
  icl->add_option("--shots", o.shots, "8 | 16 | 32")->check(CLI::IsMember({8, 16, 32}));
  auto* ablate = app.add_subcommand("ablate-sources", "Train and evaluate every source combination");
  for (auto* sub : {ingest, annotate, train, eval, icl, ablate}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    const auto config = resolve(o);
    if (ingest->parsed()) {
      simgpt::cmd_ingest(config, std::cout);
    } else if (annotate->parsed()) {
      simgpt::cmd_annotate(config, o.resume, std::cout);
    } else if (train->parsed()) {
      simgpt::cmd_train(config, std::cout);
    } else if (eval->parsed()) {
      simgpt::cmd_eval(config, std::cout);
    } else if (icl->parsed()) {
      simgpt::cmd_icl_eval(config, std::cout);
    } else if (ablate->parsed()) {
      simgpt::cmd_ablate_sources(config, std::cout);
    }
  } catch (const simgpt::Error& e) {
    std::cerr << fmt::format("error [{}]: {}\n", simgpt::to_string(e.code()), e.what());
    return 1;
  } catch (const std::exception& e) {
    std::cerr << fmt::format("error: {}\n", e.what());
    return 1;
  }
  return 0;
}
