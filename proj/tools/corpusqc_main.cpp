// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line entry point.  Exit codes: 0 success, 1 input/data errors,
// 2 configuration errors (bad config file, bad flags).

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "corpusqc/config.hpp"
#include "corpusqc/errors.hpp"
#include "corpusqc/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitConfigError = 2;

struct CliOptions {
  std::string config_path;
  std::string out_dir;
  std::size_t workers = 0;
  std::string inventory;
  std::string review_log;
  std::vector<std::string> seeds;
  bool strict = false;
  std::string system;
  std::vector<std::string> sets;
  std::vector<std::string> reports;
  std::string baseline;
};

corpusqc::pipeline::EvalSet parse_eval_set(const std::string& value) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = value.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(value.substr(start));
      break;
    }
    fields.push_back(value.substr(start, comma - start));
    start = comma + 1;
  }
  if (fields.size() != 3 || fields[0].empty() || fields[1].empty() ||
      fields[2].empty()) {
    throw corpusqc::config::ConfigError(
        "--set", "expected language,hyp_path,ref_path; got '" + value + "'");
  }
  return {fields[0], fields[1], fields[2]};
}

void print_summary(const corpusqc::pipeline::RunSummary& summary,
                   const std::string& out_dir) {
  std::printf("%s: %zu stage(s), %.1f ms, artifacts in %s\n",
              summary.command.c_str(), summary.stages.size(),
              summary.duration_ms, out_dir.c_str());
  for (const auto& stage : summary.stages) {
    std::printf("  %-10s in=%zu out=%zu", stage.name.c_str(), stage.in,
                stage.out);
    if (stage.dropped) std::printf(" dropped=%zu", stage.dropped);
    if (stage.malformed) std::printf(" malformed=%zu", stage.malformed);
    if (stage.accepted || stage.rejected) {
      std::printf(" accepted=%zu rejected=%zu", stage.accepted,
                  stage.rejected);
    }
    if (stage.skipped) std::printf(" skipped=%zu", stage.skipped);
    std::printf(" (%.1f ms)\n", stage.duration_ms);
  }
  if (!summary.errors.empty()) {
    std::printf("  %zu input error(s); see run_summary.json\n",
                summary.errors.size());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Corpus quality control and evaluation toolkit for "
               "low-resource parallel text"};
  app.require_subcommand(1);
  CliOptions options;

  const auto add_common = [&](CLI::App* cmd, bool config_required) {
    auto* config_opt = cmd->add_option("-c,--config", options.config_path,
                                       "pipeline configuration file");
    if (config_required) config_opt->required();
    cmd->add_option("-o,--out", options.out_dir,
                    "output directory (overrides config output_dir)");
    cmd->add_option("-j,--workers", options.workers,
                    "worker threads (overrides CORPUSQC_WORKERS and config)");
  };

  CLI::App* normalize_cmd = app.add_subcommand(
      "normalize", "Clean configured sources and export records");
  add_common(normalize_cmd, true);

  CLI::App* validate_cmd = app.add_subcommand(
      "validate", "Fit ratio models and write per-pair verdicts");
  add_common(validate_cmd, true);

  CLI::App* review_cmd = app.add_subcommand(
      "review-replay", "Replay a crowd-review event log and audit it");
  add_common(review_cmd, true);
  review_cmd->add_option("--log", options.review_log,
                         "event log path (overrides review.log)");
  review_cmd->add_option("--seed", options.seeds,
                         "additional seed segment id (repeatable)");
  review_cmd->add_flag("--strict", options.strict,
                       "abort on the first replay error");

  CLI::App* manifest_cmd = app.add_subcommand(
      "manifest", "Build the language inventory manifest and charts");
  add_common(manifest_cmd, false);
  manifest_cmd->add_option("--inventory", options.inventory,
                           "inventory TSV (overrides manifest.inventory)");

  CLI::App* eval_cmd =
      app.add_subcommand("eval", "Score hypothesis files with BLEU/chrF++/TER");
  add_common(eval_cmd, false);
  eval_cmd->add_option("--system", options.system, "system name")->required();
  eval_cmd
      ->add_option("--set", options.sets,
                   "language,hyp_path,ref_path (repeatable)")
      ->required();

  CLI::App* compare_cmd = app.add_subcommand(
      "compare", "Compare evaluation reports against a baseline");
  add_common(compare_cmd, false);
  compare_cmd->add_option("--report", options.reports,
                          "evaluation report JSON (repeatable)")
      ->required();
  compare_cmd->add_option("--baseline", options.baseline, "baseline system")
      ->required();

  CLI::App* pipeline_cmd = app.add_subcommand(
      "pipeline", "Run normalize, validate and manifest end to end");
  add_common(pipeline_cmd, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfigError;
  }

  try {
    corpusqc::config::PipelineConfig config;
    if (!options.config_path.empty()) {
      config = corpusqc::config::load_config(options.config_path);
    }
    if (!options.inventory.empty()) config.inventory_path = options.inventory;
    if (!options.review_log.empty()) {
      config.review_log_path = options.review_log;
    }
    for (const std::string& seed : options.seeds) {
      config.review_seeds.push_back(seed);
    }
    if (options.strict) config.review_strict = true;

    const std::size_t workers =
        corpusqc::pipeline::resolve_workers(options.workers, config);
    const std::string out_dir =
        options.out_dir.empty() ? config.output_dir : options.out_dir;
    corpusqc::pipeline::Runner runner(config, out_dir, workers);

    corpusqc::pipeline::RunSummary summary;
    if (*normalize_cmd) {
      summary = runner.run_normalize();
    } else if (*validate_cmd) {
      summary = runner.run_validate();
    } else if (*review_cmd) {
      summary = runner.run_review_replay();
    } else if (*manifest_cmd) {
      summary = runner.run_manifest();
    } else if (*eval_cmd) {
      std::vector<corpusqc::pipeline::EvalSet> sets;
      sets.reserve(options.sets.size());
      for (const std::string& value : options.sets) {
        sets.push_back(parse_eval_set(value));
      }
      summary = runner.run_eval(options.system, sets);
    } else if (*compare_cmd) {
      summary = runner.run_compare(options.reports, options.baseline);
    } else if (*pipeline_cmd) {
      summary = runner.run_pipeline();
    }
    print_summary(summary, out_dir);
    return kExitOk;
  } catch (const corpusqc::config::ConfigError& err) {
    std::fprintf(stderr, "config error: %s\n", err.what());
    return kExitConfigError;
  } catch (const corpusqc::Error& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return kExitInputError;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return kExitInputError;
  }
}
