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

#pragma once

// The three experiment commands. Each returns the files it wrote, all under
// one output directory, plus a manifest.json holding the resolved config.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ecc/app/config.hpp"
#include "ecc/app/report.hpp"

namespace ecc::app {

inline constexpr const char* kOutputEnvVar = "ECC_SIM_OUT";
inline constexpr const char* kDefaultOutputDir = "ecc-sim-out";

/// --out, then the config's output.directory, then $ECC_SIM_OUT, then the default.
std::filesystem::path resolve_output_dir(const std::optional<std::string>& cli_out, const ExperimentConfig& cfg);

/// Task stream and trained cloud teacher for one seed.
struct Experiment {
  TaskStream stream;
  CloudModel cloud;
};

Experiment build_experiment(const ExperimentConfig& cfg, std::uint64_t seed);

struct CommandResult {
  std::vector<std::filesystem::path> files;
  std::optional<LifecycleResult> lifecycle;  // cmd_run only
  std::vector<FrontierRow> frontier;
  std::vector<AblationRow> ablation;
};

CommandResult cmd_run(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);
/// Needs a non-empty filter.deltas list; throws ConfigError otherwise.
CommandResult cmd_sweep_delta(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);
/// Needs lambda1 > 0, lambda2 > 0 and a tap on both models; throws ConfigError otherwise.
CommandResult cmd_ablate(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace ecc::app
