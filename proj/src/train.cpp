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

#include "ecc/train.hpp"

#include <algorithm>
#include <numeric>

namespace ecc {

std::vector<Eigen::Index> epoch_order(Eigen::Index n, Rng& rng) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

MatXd gather_rows(const MatXd& m, std::span<const Eigen::Index> rows) {
  MatXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
  return out;
}

MlpModel<double> train_ann(const Dataset& data, std::span<const Eigen::Index> arch, std::size_t tap_index, int epochs,
                           std::uint64_t seed, const AnnTrainOptions& opts) {
  if (data.empty()) throw ArgumentError("train_ann: empty dataset");
  if (arch.empty() || arch.front() != data.dim()) throw ArgumentError("train_ann: input width must equal D");
  if (arch.back() != data.num_classes) throw ArgumentError("train_ann: output width must equal K_total");
  if (opts.batch_size < 1) throw ArgumentError("train_ann: batch size must be >= 1");

  auto model = make_mlp<double>(arch, tap_index, derive_seed(seed, 0));
  Rng rng(derive_seed(seed, 1));
  Optimizer<double> opt(opts.optimizer);
  const auto bs = static_cast<std::size_t>(opts.batch_size);

  for (int epoch = 0; epoch < epochs; ++epoch) {
    const auto order = epoch_order(data.size(), rng);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += bs) {
      const std::span<const Eigen::Index> rows(order.data() + start, std::min(bs, order.size() - start));
      const MatXd x = gather_rows(data.features, rows);
      std::vector<int> y;
      for (auto r : rows) y.push_back(data.labels[static_cast<std::size_t>(r)]);

      const auto fwd = ann_forward(model, x);
      const MatXd probs = softmax_rows(fwd.logits);
      loss_sum += cross_entropy(probs, y);
      ++batches;
      const auto grads = ann_backward(model, fwd, cross_entropy_logit_grad(probs, y));
      const auto params = parameter_blocks(model);
      const auto g = gradient_blocks(grads);
      opt.step(params, g);
    }
    if (opts.on_epoch) opts.on_epoch(epoch, loss_sum / static_cast<double>(batches));
  }
  return model;
}

}  // namespace ecc
