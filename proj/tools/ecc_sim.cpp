/*
 * Copyright 2026 The ecc-sim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// ecc-sim: command-line front end for the edge-cloud simulator.
// Exit status: 0 success, 1 runtime failure, 2 config or usage error.

#include <iostream>

#include <CLI11.hpp>

#include "ecc/app/commands.hpp"

namespace {

enum class Command { Run, SweepDelta, Ablate };

}  // namespace

int main(int argc, char** argv) {
  using namespace ecc;
  CLI::App app{"Edge-cloud co-inference simulator with an incremental spiking edge model"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  Command which = Command::Run;

  auto add = [&](const char* name, const char* help, Command c) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "YAML experiment config")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "Override train.seed");
    sub->add_option("--out", out, "Output directory (else config, then $" + std::string(app::kOutputEnvVar) + ")");
    sub->callback([&which, c] { which = c; });
  };
  add("run", "Full lifecycle with per-task reports", Command::Run);
  add("sweep-delta", "One lifecycle per delta in filter.deltas; writes frontier.csv", Command::SweepDelta);
  add("ablate", "Setup-stage ablation over lambda1/lambda2 on/off for every seed in train.seeds", Command::Ablate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    auto cfg = app::load_config(config_path);
    if (seed) {
      cfg.train.seed = *seed;
      cfg.seeds = {*seed};
    }
    const auto dir = app::resolve_output_dir(out, cfg);
    app::CommandResult res;
    switch (which) {
      case Command::Run: res = app::cmd_run(cfg, dir); break;
      case Command::SweepDelta: res = app::cmd_sweep_delta(cfg, dir); break;
      case Command::Ablate: res = app::cmd_ablate(cfg, dir); break;
    }
    for (const auto& f : res.files) std::cout << f.string() << '\n';
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "ecc-sim: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "ecc-sim: " << e.what() << '\n';
    return 1;
  }
}
