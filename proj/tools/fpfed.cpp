// Copyright 2026 The fpfed Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// fpfed: command-line driver for the synthetic federated fingerprinting
// detection pipeline.
//
//   fpfed generate  --out run/            corpus, ranking, manifest
//   fpfed partition --out run/            participant manifest
//   fpfed train     --out run/            checkpoint, stats, rounds, ledger
//   fpfed evaluate  --out run/            metrics and PR curve
//   fpfed account   --out run/            privacy report
//   fpfed run       --out run/            all of the above in order
//   fpfed sweep <recipe> --out sweeps/    figure and table data
//   fpfed catalog   --out dir/            writes the feature catalog
//
// Exit codes: 0 success, 1 other failure, 2 config error, 3 missing or
// stale upstream artifact.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fpfed/catalog.hpp"
#include "fpfed/config.hpp"
#include "fpfed/error.hpp"
#include "fpfed/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDependency = 3;

struct Options {
  std::string config_path;
  std::string out_dir = "fpfed-out";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::string preset = "default";
  std::vector<std::string> overrides;
  std::string catalog_path;
  std::string recipe;
};

fpfed::ExperimentConfig resolve_config(const Options& o) {
  fpfed::Json j = fpfed::preset_json(o.preset);
  if (!o.config_path.empty()) fpfed::merge_json(j, fpfed::read_json_file(o.config_path));
  for (const auto& kv : o.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw fpfed::ConfigError("--set", "expected path=value: " + kv);
    fpfed::set_dotted(j, kv.substr(0, eq), kv.substr(eq + 1));
  }
  auto cfg = fpfed::parse_experiment_config(j);
  if (o.seed) cfg.seeds = {*o.seed};
  if (o.workers) {
    if (*o.workers < 1) throw fpfed::ConfigError("--workers", "must be >= 1");
    cfg.workers = *o.workers;
  }
  return cfg;
}

int run(const std::string& command, const Options& o) {
  const fpfed::FeatureCatalog catalog =
      o.catalog_path.empty() ? fpfed::synthetic_catalog() : fpfed::load_catalog(o.catalog_path);
  fpfed::StageContext ctx;
  ctx.config = resolve_config(o);
  ctx.out_dir = o.out_dir;
  ctx.seed = ctx.config.seeds.front();
  ctx.catalog = &catalog;
  ctx.log = &std::cout;

  if (command == "catalog") {
    std::filesystem::create_directories(o.out_dir);
    const std::string path = (std::filesystem::path(o.out_dir) / "catalog.json").string();
    fpfed::save_catalog(catalog, path);
    std::cout << "slots " << catalog.slot_count() << " (" << catalog.api_count_size()
              << " API counts)\n";
    for (const auto& name : fpfed::builtin_feature_set_names()) {
      if (catalog.has_set(name)) std::cout << name << ' ' << catalog.mask(name).size() << '\n';
    }
    return kExitOk;
  }
  if (command == "sweep") {
    fpfed::stage_sweep(ctx, o.recipe);
    return kExitOk;
  }
  if (command == "generate" || command == "run") fpfed::stage_generate(ctx);
  if (command == "partition" || command == "run") fpfed::stage_partition(ctx);
  if (command == "train" || command == "run") fpfed::stage_train(ctx);
  if (command == "evaluate" || command == "run") fpfed::stage_evaluate(ctx);
  if (command == "account" || command == "run") fpfed::stage_account(ctx);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Federated, differentially private fingerprinting-script detection"};
  app.require_subcommand(1);
  Options o;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", o.config_path, "JSON config file")->check(CLI::ExistingFile);
    cmd->add_option("--out", o.out_dir, "Artifact directory");
    cmd->add_option("--seed", o.seed, "Run seed (replaces the config seed list)");
    cmd->add_option("--workers", o.workers, "Worker threads");
    cmd->add_option("--preset", o.preset, "Preset: default, smoke, paper-trend");
    cmd->add_option("--set", o.overrides, "Override a config field: dotted.path=value");
    cmd->add_option("--catalog", o.catalog_path, "Feature catalog JSON (default: built-in)")
        ->check(CLI::ExistingFile);
  };
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"generate", "Generate the synthetic trace corpus"},
      {"partition", "Partition training domains into participants"},
      {"train", "DP normalisation and DP-FedAvg training"},
      {"evaluate", "Score the held-out split"},
      {"account", "Replay the privacy ledger"},
      {"run", "Run every stage in order"},
      {"sweep", "Run a figure/table sweep recipe"},
      {"catalog", "Write the feature catalog"}};
  for (const auto& [name, help] : commands) {
    CLI::App* cmd = app.add_subcommand(name, help);
    add_common(cmd);
    if (name == "sweep") {
      cmd->add_option("recipe", o.recipe, "Recipe name")
          ->required()
          ->check(CLI::IsMember(fpfed::sweep_recipes()));
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, o);
  } catch (const fpfed::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const fpfed::StageDependencyError& e) {
    std::cerr << "stage dependency error: " << e.what() << '\n';
    return kExitDependency;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}
