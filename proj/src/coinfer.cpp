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

#include "ecc/coinfer.hpp"

#include <algorithm>
#include <iostream>

namespace ecc {

int EdgeClassifier::column_of(int class_id) const {
  const auto it = std::find(classes.begin(), classes.end(), class_id);
  return it == classes.end() ? -1 : static_cast<int>(it - classes.begin());
}

MatXd CloudModel::logits(const MatXd& batch, std::span<const int> labels) const {
  if (!perfect_oracle) return ann_forward(mlp, batch).logits;
  if (static_cast<Eigen::Index>(labels.size()) != batch.rows())
    throw ArgumentError("CloudModel: the oracle needs a ground-truth label per row");
  MatXd z = MatXd::Zero(batch.rows(), num_classes());
  for (Eigen::Index i = 0; i < batch.rows(); ++i) {
    const int y = labels[static_cast<std::size_t>(i)];
    if (y < 0 || y >= num_classes()) throw ArgumentError("CloudModel: label outside the cloud label space");
    z(i, y) = oracle_logit;
  }
  return z;
}

void AmbiguityBuffer::append(BufferEntry entry) {
  if (capacity_ && *capacity_ == 0) return;
  if (capacity_ && entries_.size() >= *capacity_) {
    entries_.pop_front();
    ++evictions_;
    std::cerr << "warning: ambiguity buffer full (" << *capacity_ << "), evicting oldest entry\n";
  }
  entries_.push_back(std::move(entry));
}

std::vector<BufferEntry> AmbiguityBuffer::flush() {
  std::vector<BufferEntry> out(std::make_move_iterator(entries_.begin()), std::make_move_iterator(entries_.end()));
  entries_.clear();
  return out;
}

std::vector<BufferEntry> flush_buffer(AmbiguityBuffer& buffer) { return buffer.flush(); }

InferenceOutcome infer_one(const Sample& x, const EdgeClassifier& edge, const CloudModel& cloud,
                           const FilterConfig& filter, AmbiguityBuffer& buffer, const CostConstants& costs) {
  if (x.features.size() != edge.snn.input_dim() || x.features.size() != cloud.mlp.input_dim())
    throw ArgumentError("infer_one: sample dimension does not match the models");

  const MatXd row = x.features.transpose();
  const auto fwd = snn_forward(edge.snn, row, /*record_trace=*/true);
  const VecXd z = fwd.logits.row(0).transpose();
  const auto decision = route(z, filter);
  const auto ops = edge_ops(edge.snn, fwd.trace);

  InferenceOutcome out;
  out.label = x.label;
  out.score = decision.score;
  out.route = decision.route;
  out.cost.compute_energy_mj = edge_energy(edge.snn, fwd.trace, costs);
  out.cost.compute_latency_ms = path_latency(Route::Edge, ops.total(), 0.0, {}, costs);

  out.edge_prediction = edge.classes.at(static_cast<std::size_t>(argmax(z)));
  if (decision.route == Route::Edge) {
    out.prediction = out.edge_prediction;
  } else {
    const std::array<int, 1> label{x.label};
    const VecXd cloud_z = cloud.logits(row, label).row(0).transpose();
    out.prediction = static_cast<int>(argmax(cloud_z));
    const auto comm = comm_cost(x.features.size(), costs);
    const double cloud_macs = static_cast<double>(cloud.mlp.total_macs());
    out.cost.compute_energy_mj += cloud_energy(cloud.mlp, costs);
    out.cost.comm_energy_mj = comm.energy_mj;
    out.cost.compute_latency_ms += cloud_macs / costs.cloud_throughput_macs_per_s * 1000.0;
    out.cost.comm_latency_ms = comm.latency_ms;
    buffer.append({x.features, cloud_z, out.prediction});
  }
  if (x.label >= 0) out.correct = out.prediction == x.label;
  return out;
}

ExecutionReport run_execution_stage(const Dataset& stream, const EdgeClassifier& edge, const CloudModel& cloud,
                                    const FilterConfig& filter, AmbiguityBuffer& buffer, const CostConstants& costs) {
  if (stream.empty()) throw ArgumentError("run_execution_stage: empty stream");
  filter.validate();
  ExecutionReport r;
  std::size_t correct = 0;
  for (Eigen::Index i = 0; i < stream.size(); ++i) {
    auto o = infer_one(stream.sample(i), edge, cloud, filter, buffer, costs);
    (o.route == Route::Edge ? r.edge_count : r.cloud_count)++;
    if (o.correct.value_or(false)) ++correct;
    r.totals += o.cost;
    r.outcomes.push_back(std::move(o));
  }
  const double n = static_cast<double>(stream.size());
  r.accuracy = static_cast<double>(correct) / n;
  r.cur = static_cast<double>(r.cloud_count) / n;
  r.mean_energy_mj = r.totals.total_energy_mj() / n;
  r.mean_latency_ms = r.totals.total_latency_ms() / n;
  r.buffer_size = buffer.size();
  return r;
}

std::vector<int> edge_predict(const EdgeClassifier& edge, const MatXd& batch) {
  const MatXd z = snn_forward(edge.snn, batch, false).logits;
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(z.rows()));
  for (Eigen::Index i = 0; i < z.rows(); ++i) out.push_back(edge.classes.at(static_cast<std::size_t>(argmax(z.row(i)))));
  return out;
}

double edge_accuracy(const EdgeClassifier& edge, const Dataset& data) {
  if (data.empty()) throw ArgumentError("edge_accuracy: empty dataset");
  const auto pred = edge_predict(edge, data.features);
  std::size_t hit = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hit += pred[i] == data.labels[i];
  return static_cast<double>(hit) / static_cast<double>(pred.size());
}

std::vector<double> edge_scores(const EdgeClassifier& edge, const MatXd& batch) {
  const MatXd z = snn_forward(edge.snn, batch, false).logits;
  std::vector<double> out;
  for (Eigen::Index i = 0; i < z.rows(); ++i) out.push_back(normalized_entropy(VecXd(z.row(i).transpose())));
  return out;
}

double cloud_accuracy(const CloudModel& cloud, const Dataset& data) {
  if (data.empty()) throw ArgumentError("cloud_accuracy: empty dataset");
  const MatXd z = cloud.logits(data.features, data.labels);
  std::size_t hit = 0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) hit += argmax(z.row(i)) == data.labels[static_cast<std::size_t>(i)];
  return static_cast<double>(hit) / static_cast<double>(z.rows());
}

}  // namespace ecc
