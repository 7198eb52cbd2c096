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

#include "ecc/continual.hpp"

#include <algorithm>
#include <iostream>

#include "ecc/train.hpp"

namespace ecc {

namespace {

MatXd select_columns(const MatXd& m, std::span<const int> cols) {
  MatXd out(m.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (cols[j] < 0 || cols[j] >= m.cols()) throw ArgumentError("select_columns: class outside the cloud label space");
    out.col(static_cast<Eigen::Index>(j)) = m.col(cols[j]);
  }
  return out;
}

std::vector<int> gather(std::span<const int> v, std::span<const Eigen::Index> rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(v[static_cast<std::size_t>(r)]);
  return out;
}

template <typename Fn>
void for_each_batch(const std::vector<Eigen::Index>& order, int batch_size, Fn&& fn) {
  const auto bs = static_cast<std::size_t>(batch_size);
  for (std::size_t start = 0; start < order.size(); start += bs)
    fn(std::span<const Eigen::Index>(order.data() + start, std::min(bs, order.size() - start)));
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 0 || update_epochs < 0) throw ArgumentError("TrainConfig: epochs must be >= 0");
  if (batch_size < 1) throw ArgumentError("TrainConfig: batch size must be >= 1");
  if (!(optimizer.learning_rate > 0)) throw ArgumentError("TrainConfig: learning rate must be positive");
  if (!(update_lr_scale > 0)) throw ArgumentError("TrainConfig: update learning-rate scale must be positive");
  weights.validate();
}

bool cloud_has_tap(const CloudModel& cloud) {
  return cloud.mlp.layers.size() >= 2 && cloud.mlp.feature_tap_index + 1 < cloud.mlp.layers.size();
}

EdgeClassifier setup_stage(const TaskSplit& task1, const CloudModel& cloud, const EdgeArch& arch,
                           const TrainConfig& cfg) {
  cfg.validate();
  const Dataset& train = task1.train;
  if (train.empty()) throw ArgumentError("setup_stage: task 1 has no training data");
  const bool align = cfg.weights.lambda2 > 0;
  if (align && (!arch.tap_layer || !cloud_has_tap(cloud)))
    throw ConfigError("setup_stage: lambda2 > 0 requires a tap layer on both the edge and the cloud model");

  std::vector<Eigen::Index> widths{train.dim()};
  widths.insert(widths.end(), arch.hidden.begin(), arch.hidden.end());
  widths.push_back(static_cast<Eigen::Index>(task1.class_ids.size()));
  EdgeClassifier edge{make_snn<double>(widths, arch.lif, arch.tap_layer.value_or(0), derive_seed(cfg.seed, 10),
                                       arch.encoding_gain),
                      task1.class_ids};
  if (cfg.epochs == 0) return edge;

  std::vector<int> labels;
  for (int y : train.labels) {
    const int col = edge.column_of(y);
    if (col < 0) throw ArgumentError("setup_stage: training label outside task 1 classes");
    labels.push_back(col);
  }
  const MatXd teacher = select_columns(cloud.logits(train.features, train.labels), edge.classes);
  MatXd ann_features;
  if (align) ann_features = ann_forward(cloud.mlp, train.features).tap_features;

  auto head = AlignmentHead<double>::make(edge.snn.tap_dim(), align ? cloud.mlp.tap_dim() : 1, derive_seed(cfg.seed, 11));
  Optimizer<double> snn_opt(cfg.optimizer);
  Optimizer<double> head_opt(cfg.optimizer);
  Rng rng(derive_seed(cfg.seed, 12));

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for_each_batch(epoch_order(train.size(), rng), cfg.batch_size, [&](std::span<const Eigen::Index> rows) {
      const MatXd x = gather_rows(train.features, rows);
      const auto y = gather(labels, rows);
      const MatXd t = gather_rows(teacher, rows);
      const auto fwd = snn_forward(edge.snn, x, true);

      std::optional<AlignmentInputs<double>> inputs;
      MatXd fa;
      if (align) {
        fa = gather_rows(ann_features, rows);
        inputs.emplace(AlignmentInputs<double>{fwd.trace->tap_sum, head, fa, true});
      }
      const auto loss = joint_loss(fwd.logits, y, t, inputs, cfg.weights);
      const MatXd* d_tap = loss.alignment ? &loss.alignment->d_summed_spikes : nullptr;
      const auto grads = snn_backward(edge.snn, x, fwd.trace, loss.d_logits, d_tap);
      snn_opt.step(parameter_blocks(edge.snn), gradient_blocks(grads));
      if (loss.alignment) {
        head_opt.step(parameter_blocks(head), gradient_blocks(loss.alignment->head_grad));
        head.update_running_stats(loss.alignment->batch_mean, loss.alignment->batch_var, x.rows());
      }
    });
  }
  return edge;
}

EdgeClassifier update_stage(const EdgeClassifier& edge, std::span<const BufferEntry> entries,
                            const ModelSnapshot& snapshot, std::span<const int> new_class_ids,
                            const TrainConfig& cfg) {
  if (entries.empty()) {
    std::cerr << "warning: update stage received an empty buffer; edge model left unchanged\n";
    return edge;
  }
  cfg.validate();
  const auto& old = snapshot.model();
  if (old.classes.size() > edge.classes.size() ||
      !std::equal(old.classes.begin(), old.classes.end(), edge.classes.begin()))
    throw ArgumentError("update_stage: snapshot classes must prefix the edge model's classes");

  EdgeClassifier next = edge;
  std::vector<int> added;
  for (int c : new_class_ids)
    if (next.column_of(c) < 0 && std::find(added.begin(), added.end(), c) == added.end()) added.push_back(c);
  if (!added.empty()) {
    next.snn = expand_readout(next.snn, next.num_classes() + static_cast<Eigen::Index>(added.size()),
                              derive_seed(cfg.seed, 20 + static_cast<std::uint64_t>(next.num_classes())));
    next.classes.insert(next.classes.end(), added.begin(), added.end());
  }

  const auto n = static_cast<Eigen::Index>(entries.size());
  const Eigen::Index dim = entries.front().features.size();
  const Eigen::Index cloud_k = entries.front().cloud_logits.size();
  MatXd x(n, dim), cloud_full(n, cloud_k);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& e = entries[static_cast<std::size_t>(i)];
    if (e.features.size() != dim || e.cloud_logits.size() != cloud_k)
      throw ArgumentError("update_stage: inconsistent buffer entries");
    x.row(i) = e.features.transpose();
    cloud_full.row(i) = e.cloud_logits.transpose();
  }
  const MatXd cloud = select_columns(cloud_full, next.classes);
  // A cloud answer outside the known classes falls back to the best known one.
  std::vector<int> labels;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int col = next.column_of(entries[static_cast<std::size_t>(i)].label);
    labels.push_back(col >= 0 ? col : static_cast<int>(argmax(cloud.row(i))));
  }
  const MatXd old_logits = snn_forward(old.snn, x, false).logits;

  OptimizerOptions opt = cfg.optimizer;
  opt.learning_rate *= cfg.update_lr_scale;
  Optimizer<double> optimizer(opt);
  Rng rng(derive_seed(cfg.seed, 21));
  for (int epoch = 0; epoch < cfg.update_epochs; ++epoch) {
    for_each_batch(epoch_order(n, rng), cfg.batch_size, [&](std::span<const Eigen::Index> rows) {
      const MatXd xb = gather_rows(x, rows);
      const auto fwd = snn_forward(next.snn, xb, true);
      const auto loss =
          lwf_loss(fwd.logits, gather(labels, rows), gather_rows(cloud, rows), gather_rows(old_logits, rows), cfg.weights);
      const auto grads = snn_backward(next.snn, xb, fwd.trace, loss.d_logits);
      optimizer.step(parameter_blocks(next.snn), gradient_blocks(grads));
    });
  }
  return next;
}

Dataset execution_stream(const TaskStream& stream, std::size_t n, std::uint64_t seed) {
  if (n < 1 || n > stream.size()) throw ArgumentError("execution_stream: task index out of range");
  std::vector<Dataset> parts;
  for (std::size_t m = 0; m < n; ++m) parts.push_back(stream.splits[m].test);
  Dataset all = Dataset::concat(parts, "execution/task" + std::to_string(n));
  Rng rng(seed);
  const auto order = epoch_order(all.size(), rng);
  return all.subset(order, all.name);
}

LifecycleResult run_lifecycle(const TaskStream& stream, const CloudModel& cloud, const FilterConfig& filter,
                              const CostConstants& costs, const EdgeArch& arch, const TrainConfig& cfg,
                              const LifecycleOptions& opts) {
  if (stream.size() == 0) throw ArgumentError("run_lifecycle: empty task stream");
  filter.validate();
  costs.validate();
  LifecycleResult result;
  result.matrix = AccuracyMatrix(stream.size());
  EdgeClassifier edge = setup_stage(stream.splits.front(), cloud, arch, cfg);
  AmbiguityBuffer buffer(opts.buffer_capacity);
  const Dataset& task1_test = stream.splits.front().test;
  std::vector<int> seen;

  for (std::size_t n = 1; n <= stream.size(); ++n) {
    const auto& split = stream.splits[n - 1];
    seen.insert(seen.end(), split.class_ids.begin(), split.class_ids.end());
    const Dataset exec = execution_stream(stream, n, derive_seed(cfg.seed, 100 + n));
    result.reports.push_back(run_execution_stage(exec, edge, cloud, filter, buffer, costs));

    TaskRecord rec;
    rec.task = static_cast<int>(n);
    rec.exec_cloud_accuracy = cloud_accuracy(cloud, exec);
    rec.cur_task1_before = cur(edge_scores(edge, task1_test.features), filter.delta);
    if (n >= 2 && !opts.skip_updates) {
      const auto snapshot = take_snapshot(edge);
      const auto drained = flush_buffer(buffer);
      rec.drained = drained.size();
      TrainConfig task_cfg = cfg;
      task_cfg.seed = derive_seed(cfg.seed, 200 + n);
      edge = update_stage(edge, drained, snapshot, seen, task_cfg);
    }
    rec.cur_task1_after = cur(edge_scores(edge, task1_test.features), filter.delta);
    for (std::size_t m = 1; m <= n; ++m) result.matrix.set(n, m, edge_accuracy(edge, stream.splits[m - 1].test));
    rec.avg_accuracy = avg_accuracy(result.matrix, n);
    rec.readout_width = static_cast<std::size_t>(edge.num_classes());
    result.tasks.push_back(rec);
  }
  result.final_edge = std::move(edge);
  return result;
}

}  // namespace ecc
