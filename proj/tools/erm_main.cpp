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

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "erm/errors.hpp"
#include "erm/pipeline.hpp"
#include "erm/taxonomy.hpp"

namespace {

struct CliOptions {
  std::string manifest;
  std::string out = "erm-out";
  std::string backend = "rule";
  std::size_t window_size = erm::kDefaultWindowSize;
  std::size_t jobs = 1;
  bool force = false;
};

void add_common_options(CLI::App* cmd, CliOptions& options,
                        bool needs_manifest) {
  cmd->add_option("--manifest", options.manifest,
                  "Corpus manifest (JSON Lines)")
      ->required(needs_manifest);
  cmd->add_option("--out", options.out, "Output directory (the record store)");
  cmd->add_option("--backend", options.backend,
                  "Annotation backend: rule, llm, or hybrid")
      ->check(CLI::IsMember({"rule", "llm", "hybrid"}));
  cmd->add_option("--window-size", options.window_size,
                  "Words per entropy window")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--jobs", options.jobs, "Concurrent documents")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--force", options.force, "Overwrite existing records");
}

erm::RunConfig to_run_config(const CliOptions& options) {
  erm::RunConfig config;
  config.manifest_path = options.manifest;
  config.output_dir = options.out;
  config.backend = *erm::backend_from_string(options.backend);
  config.window_size = options.window_size;
  config.concurrency_bound = options.jobs;
  config.force = options.force;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Epistemic-rhetorical marker pipeline"};
  app.require_subcommand(1);

  CliOptions options;
  CLI::App* segment =
      app.add_subcommand("segment", "Sentence/chunk/window segmentation");
  CLI::App* annotate =
      app.add_subcommand("annotate", "Run the annotation passes");
  CLI::App* features =
      app.add_subcommand("features", "Compute per-document metrics");
  CLI::App* compare =
      app.add_subcommand("compare", "Cross-group statistical comparison");
  CLI::App* report = app.add_subcommand(
      "report", "Comparison plus raw per-device count exports");
  for (CLI::App* cmd : {segment, annotate, features, compare, report}) {
    add_common_options(cmd, options, /*needs_manifest=*/true);
  }

  std::string taxonomy_out = "erm-taxonomy.json";
  CLI::App* taxonomy = app.add_subcommand(
      "taxonomy", "Write the machine-readable marker schema");
  taxonomy->add_option("--out", taxonomy_out, "Destination file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (taxonomy->parsed()) {
      erm::write_taxonomy_json(taxonomy_out);
      std::cout << "wrote " << taxonomy_out << "\n";
      return erm::kExitOk;
    }
    const erm::RunConfig config = to_run_config(options);
    if (segment->parsed()) {
      return erm::cmd_segment(config, std::cout, std::cerr);
    }
    if (annotate->parsed()) {
      return erm::cmd_annotate(config, std::cout, std::cerr);
    }
    if (features->parsed()) {
      return erm::cmd_features(config, std::cout, std::cerr);
    }
    if (compare->parsed()) {
      return erm::cmd_compare(config, std::cout, std::cerr);
    }
    if (report->parsed()) {
      return erm::cmd_report(config, std::cout, std::cerr);
    }
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return erm::kExitConfig;
  }
  return erm::kExitConfig;
}
