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

// Experiment configuration: YAML in, fully resolved JSON manifest out. Every
// field has a default; unknown keys and ill-typed values are rejected with
// the offending line number.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ecc/continual.hpp"

namespace ecc::app {

struct DataConfig {
  std::string source = "blobs";  // "blobs" or "csv"
  std::string csv_path;
  int num_classes = 8;
  int dim = 16;
  int n_per_class = 100;
  double spread = 0.35;
  int base_classes = 4;       // u
  int increment_classes = 2;  // v
  double test_fraction = 0.25;
};

struct CloudConfig {
  std::vector<Eigen::Index> hidden{128, 64};
  std::size_t tap_layer = 0;
  int epochs = 60;
  double learning_rate = 0.05;
  bool perfect_oracle = false;
  double oracle_logit = 10.0;
};

struct OutputConfig {
  std::string directory;  // empty: --out, then ECC_SIM_OUT, then ./ecc-sim-out
  bool outcomes = true;
  bool checkpoints = true;
};

struct ExperimentConfig {
  DataConfig data;
  EdgeArch edge;
  CloudConfig cloud;
  FilterConfig filter;
  std::vector<double> deltas;  // sweep list; empty when only `delta` is given
  TrainConfig train;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};  // ablation seeds
  std::optional<std::size_t> buffer_capacity;
  CostConstants costs;
  OutputConfig output;

  /// Cross-field checks; throws ConfigError.
  void validate() const;
};

/// Parses YAML text. `origin` names the source in error messages.
ExperimentConfig parse_config(const std::string& yaml_text, const std::string& origin = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

nlohmann::ordered_json to_json(const ExperimentConfig& cfg);

}  // namespace ecc::app
