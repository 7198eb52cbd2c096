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

#include <functional>

#include "ecc/data.hpp"
#include "ecc/nn.hpp"

namespace ecc {

struct AnnTrainOptions {
  int batch_size = 32;
  OptimizerOptions optimizer{};
  /// Called after every epoch with the mean training loss of that epoch.
  std::function<void(int, double)> on_epoch;
};

/// Mini-batch cross-entropy training of an MLP over every class of `data`.
/// `arch` lists input width, hidden widths and K_total.
MlpModel<double> train_ann(const Dataset& data, std::span<const Eigen::Index> arch, std::size_t tap_index, int epochs,
                           std::uint64_t seed, const AnnTrainOptions& opts = {});

/// Shuffled row order for one epoch.
std::vector<Eigen::Index> epoch_order(Eigen::Index n, Rng& rng);

MatXd gather_rows(const MatXd& m, std::span<const Eigen::Index> rows);

}  // namespace ecc
