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

#include "ecc/app/commands.hpp"

#include <cstdlib>

#include "ecc/checkpoint.hpp"
#include "ecc/train.hpp"

namespace ecc::app {

namespace fs = std::filesystem;

fs::path resolve_output_dir(const std::optional<std::string>& cli_out, const ExperimentConfig& cfg) {
  if (cli_out && !cli_out->empty()) return *cli_out;
  if (!cfg.output.directory.empty()) return cfg.output.directory;
  if (const char* env = std::getenv(kOutputEnvVar); env && *env) return env;
  return kDefaultOutputDir;
}

Experiment build_experiment(const ExperimentConfig& cfg, std::uint64_t seed) {
  const auto& d = cfg.data;
  const Dataset all = d.source == "csv" ? load_csv(d.csv_path)
                                        : generate_blobs(seed, d.num_classes, d.dim, d.n_per_class, d.spread);
  Experiment ex;
  ex.stream = make_task_stream(all, d.base_classes, d.increment_classes, d.test_fraction, seed);

  std::vector<Dataset> trains;
  for (const auto& s : ex.stream.splits) trains.push_back(s.train);
  const Dataset pooled = Dataset::concat(trains);
  std::vector<Eigen::Index> arch{all.dim()};
  arch.insert(arch.end(), cfg.cloud.hidden.begin(), cfg.cloud.hidden.end());
  arch.push_back(all.num_classes);
  AnnTrainOptions opts;
  opts.batch_size = cfg.train.batch_size;
  opts.optimizer = cfg.train.optimizer;
  opts.optimizer.learning_rate = cfg.cloud.learning_rate;
  ex.cloud.mlp = train_ann(pooled, arch, cfg.cloud.tap_layer, cfg.cloud.epochs, seed, opts);
  ex.cloud.perfect_oracle = cfg.cloud.perfect_oracle;
  ex.cloud.oracle_logit = cfg.cloud.oracle_logit;
  return ex;
}

namespace {

TrainConfig train_config_for(const ExperimentConfig& cfg, std::uint64_t seed) {
  TrainConfig t = cfg.train;
  t.seed = seed;
  return t;
}

LifecycleResult lifecycle_at(const ExperimentConfig& cfg, const Experiment& ex, double delta) {
  FilterConfig filter = cfg.filter;
  filter.delta = delta;
  LifecycleOptions opts;
  opts.buffer_capacity = cfg.buffer_capacity;
  return run_lifecycle(ex.stream, ex.cloud, filter, cfg.costs, cfg.edge, train_config_for(cfg, cfg.train.seed), opts);
}

void emit(CommandResult& res, const fs::path& path, const std::string& content) {
  write_atomic(path, content);
  res.files.push_back(path);
}

void emit_manifest(CommandResult& res, const fs::path& dir, const char* command, const ExperimentConfig& cfg) {
  nlohmann::ordered_json m;
  m["tool"] = "ecc-sim";
  m["command"] = command;
  m["seed"] = cfg.train.seed;
  m["config"] = to_json(cfg);
  auto files = nlohmann::ordered_json::array();
  for (const auto& f : res.files) files.push_back(fs::relative(f, dir).generic_string());
  m["files"] = files;
  emit(res, dir / "manifest.json", m.dump(2) + "\n");
}

std::vector<FrontierRow> sweep(const ExperimentConfig& cfg, const Experiment& ex) {
  std::vector<FrontierRow> rows;
  for (double delta : cfg.deltas) rows.push_back(summarize_frontier(delta, lifecycle_at(cfg, ex, delta)));
  return rows;
}

}  // namespace

CommandResult cmd_run(const ExperimentConfig& cfg, const fs::path& out_dir) {
  cfg.validate();
  CommandResult res;
  const Experiment ex = build_experiment(cfg, cfg.train.seed);
  auto life = lifecycle_at(cfg, ex, cfg.filter.delta);

  emit(res, out_dir / "accuracy_matrix.csv", accuracy_matrix_table(life.matrix, cfg.costs).str());
  emit(res, out_dir / "per_task_report.csv", per_task_table(life, cfg.costs).str());
  if (cfg.output.outcomes)
    for (std::size_t i = 0; i < life.reports.size(); ++i)
      emit(res, out_dir / ("outcomes_task" + std::to_string(i + 1) + ".csv"),
           outcomes_table(life.reports[i], cfg.costs).str());
  if (cfg.output.checkpoints) {
    save_checkpoint(ex.cloud.mlp, cfg.train.seed, out_dir / "checkpoints" / "cloud.json");
    res.files.push_back(out_dir / "checkpoints" / "cloud.json");
    save_checkpoint(life.final_edge, cfg.train.seed, out_dir / "checkpoints" / "edge_final.json");
    res.files.push_back(out_dir / "checkpoints" / "edge_final.json");
  }
  if (!cfg.deltas.empty()) {
    res.frontier = sweep(cfg, ex);
    emit(res, out_dir / "frontier.csv", frontier_table(res.frontier, cfg.costs).str());
  }
  res.lifecycle = std::move(life);
  emit_manifest(res, out_dir, "run", cfg);
  return res;
}

CommandResult cmd_sweep_delta(const ExperimentConfig& cfg, const fs::path& out_dir) {
  cfg.validate();
  if (cfg.deltas.empty()) throw ConfigError("config: sweep-delta needs a non-empty filter.deltas list");
  CommandResult res;
  const Experiment ex = build_experiment(cfg, cfg.train.seed);
  res.frontier = sweep(cfg, ex);
  emit(res, out_dir / "frontier.csv", frontier_table(res.frontier, cfg.costs).str());
  emit_manifest(res, out_dir, "sweep-delta", cfg);
  return res;
}

CommandResult cmd_ablate(const ExperimentConfig& cfg, const fs::path& out_dir) {
  cfg.validate();
  const auto& w = cfg.train.weights;
  if (!(w.lambda1 > 0) || !(w.lambda2 > 0))
    throw ConfigError("config: ablate uses losses.lambda1 and losses.lambda2 as the 'on' values; both must be > 0");
  if (!cfg.edge.tap_layer || cfg.cloud.hidden.empty())
    throw ConfigError("config: ablate needs edge.tap_layer and a hidden cloud layer for the alignment arms");

  CommandResult res;
  for (std::uint64_t seed : cfg.seeds) {
    const Experiment ex = build_experiment(cfg, seed);
    const TaskSplit& task1 = ex.stream.splits.front();
    for (const auto& [l1, l2] : {std::pair{0.0, 0.0}, {w.lambda1, 0.0}, {0.0, w.lambda2}, {w.lambda1, w.lambda2}}) {
      TrainConfig t = train_config_for(cfg, seed);
      t.weights.lambda1 = l1;
      t.weights.lambda2 = l2;
      const auto edge = setup_stage(task1, ex.cloud, cfg.edge, t);
      res.ablation.push_back({seed, l1, l2, edge_accuracy(edge, task1.test)});
    }
  }
  emit(res, out_dir / "ablation.csv", ablation_table(res.ablation, cfg.costs).str());
  emit_manifest(res, out_dir, "ablate", cfg);
  return res;
}

}  // namespace ecc::app
