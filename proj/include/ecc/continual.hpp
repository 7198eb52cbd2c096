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

// Setup trains the edge jointly with the ANN teacher on the base task. Update
// learns new classes from drained buffer entries only; no exemplars are kept.
// run_lifecycle drives both around the execution stage for a task stream.

#include <optional>

#include "ecc/coinfer.hpp"
#include "ecc/losses.hpp"
#include "ecc/metrics.hpp"

namespace ecc {

struct EdgeArch {
  std::vector<Eigen::Index> hidden{32};
  LifConfig<double> lif{};
  std::optional<std::size_t> tap_layer = 0;
  double encoding_gain = 4.0;
};

struct TrainConfig {
  int epochs = 30;
  int update_epochs = 10;
  int batch_size = 32;
  OptimizerOptions optimizer{};
  double update_lr_scale = 0.1;
  LossWeights weights{};
  std::uint64_t seed = 1;

  void validate() const;
};

/// Frozen copy of the edge model taken before an update.
class ModelSnapshot {
 public:
  explicit ModelSnapshot(EdgeClassifier model) : model_(std::move(model)) {}
  const EdgeClassifier& model() const { return model_; }

 private:
  const EdgeClassifier model_;
};

inline ModelSnapshot take_snapshot(const EdgeClassifier& edge) { return ModelSnapshot(edge); }

/// Teacher tap features exist only if the cloud has a hidden tap layer.
bool cloud_has_tap(const CloudModel& cloud);

EdgeClassifier setup_stage(const TaskSplit& task1, const CloudModel& cloud, const EdgeArch& arch,
                           const TrainConfig& cfg);

/// Expands the head to cover `new_class_ids`, then trains on `entries` with
/// the incremental loss. An empty buffer returns the model unchanged.
EdgeClassifier update_stage(const EdgeClassifier& edge, std::span<const BufferEntry> entries,
                            const ModelSnapshot& snapshot, std::span<const int> new_class_ids,
                            const TrainConfig& cfg);

struct TaskRecord {
  int task = 1;
  std::size_t drained = 0;            // buffer entries consumed by this task's update
  std::size_t readout_width = 0;      // after the task
  double cur_task1_before = 0.0;      // edge-only CUR on task-1 test data before the update
  double cur_task1_after = 0.0;       // ... and after it
  double avg_accuracy = 0.0;          // mean of accuracy-matrix row n
  double exec_cloud_accuracy = 0.0;   // cloud-only accuracy on this task's execution stream
};

struct LifecycleResult {
  std::vector<ExecutionReport> reports;  // one per task
  std::vector<TaskRecord> tasks;
  AccuracyMatrix matrix;
  EdgeClassifier final_edge;
};

struct LifecycleOptions {
  std::optional<std::size_t> buffer_capacity;
  bool skip_updates = false;  // frozen-edge baseline
};

LifecycleResult run_lifecycle(const TaskStream& stream, const CloudModel& cloud, const FilterConfig& filter,
                              const CostConstants& costs, const EdgeArch& arch, const TrainConfig& cfg,
                              const LifecycleOptions& opts = {});

/// Test samples of tasks 1..n, interleaved by a seeded shuffle.
Dataset execution_stream(const TaskStream& stream, std::size_t n, std::uint64_t seed);

}  // namespace ecc
