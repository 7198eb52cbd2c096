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

// Execution stage: every sample runs through the edge SNN. Ambiguous ones go
// to the cloud MLP, whose answer is buffered for the next update.
// Uploads are in-process calls whose cost is accounted, not real transport.

#include <deque>
#include <optional>
#include <vector>

#include "ecc/costs.hpp"
#include "ecc/data.hpp"
#include "ecc/filter.hpp"

namespace ecc {

/// Edge SNN plus the global class id behind each readout column.
struct EdgeClassifier {
  SnnModel<double> snn;
  std::vector<int> classes;

  Eigen::Index num_classes() const { return snn.num_classes(); }
  /// Readout column of a global class id, or -1 if unknown.
  int column_of(int class_id) const;
};

/// Frozen cloud teacher. With `perfect_oracle` set, logits are
/// `oracle_logit * onehot(label)` and the MLP only supplies tap features and
/// the compute cost.
struct CloudModel {
  MlpModel<double> mlp;
  bool perfect_oracle = false;
  double oracle_logit = 10.0;

  Eigen::Index num_classes() const { return mlp.num_classes(); }
  MatXd logits(const MatXd& batch, std::span<const int> labels) const;
};

struct BufferEntry {
  VecXd features;
  VecXd cloud_logits;  // over every class the cloud knows
  int label = 0;       // cloud argmax (global id)
};

class AmbiguityBuffer {
 public:
  explicit AmbiguityBuffer(std::optional<std::size_t> capacity = std::nullopt) : capacity_(capacity) {}

  /// Appends; at capacity the oldest entry is evicted with a warning.
  void append(BufferEntry entry);
  /// Drains every entry in insertion order.
  std::vector<BufferEntry> flush();

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::size_t evictions() const { return evictions_; }
  const std::deque<BufferEntry>& entries() const { return entries_; }

 private:
  std::optional<std::size_t> capacity_;
  std::deque<BufferEntry> entries_;
  std::size_t evictions_ = 0;
};

struct InferenceOutcome {
  int prediction = 0;
  int edge_prediction = 0;  // edge argmax, whichever route answered
  int label = -1;
  Route route = Route::Edge;
  double score = 0.0;
  CostReport cost;
  std::optional<bool> correct;
};

struct ExecutionReport {
  std::vector<InferenceOutcome> outcomes;
  double accuracy = 0.0;
  double cur = 0.0;
  double mean_energy_mj = 0.0;
  double mean_latency_ms = 0.0;
  std::size_t buffer_size = 0;
  std::size_t edge_count = 0;
  std::size_t cloud_count = 0;
  CostReport totals;
};

InferenceOutcome infer_one(const Sample& x, const EdgeClassifier& edge, const CloudModel& cloud,
                           const FilterConfig& filter, AmbiguityBuffer& buffer, const CostConstants& costs);

ExecutionReport run_execution_stage(const Dataset& stream, const EdgeClassifier& edge, const CloudModel& cloud,
                                    const FilterConfig& filter, AmbiguityBuffer& buffer, const CostConstants& costs);

std::vector<BufferEntry> flush_buffer(AmbiguityBuffer& buffer);

/// Standalone edge predictions (global class ids) for every row.
std::vector<int> edge_predict(const EdgeClassifier& edge, const MatXd& batch);
double edge_accuracy(const EdgeClassifier& edge, const Dataset& data);
/// Normalized-entropy routing score of every row.
std::vector<double> edge_scores(const EdgeClassifier& edge, const MatXd& batch);
double cloud_accuracy(const CloudModel& cloud, const Dataset& data);

}  // namespace ecc
