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

#include <optional>
#include <span>
#include <vector>

#include "ecc/types.hpp"

namespace ecc {

/// Lower-triangular a[n][m]: accuracy on task m after learning task n
/// (both 1-based in the public interface).
class AccuracyMatrix {
 public:
  AccuracyMatrix() = default;
  explicit AccuracyMatrix(std::size_t num_tasks);

  std::size_t num_tasks() const { return rows_.size(); }
  void set(std::size_t n, std::size_t m, double accuracy);
  std::optional<double> get(std::size_t n, std::size_t m) const;
  bool row_complete(std::size_t n) const;
  std::vector<double> row(std::size_t n) const;

 private:
  std::vector<std::vector<std::optional<double>>> rows_;
};

/// Mean of row n (the average accuracy over tasks seen after task n).
double avg_accuracy(const AccuracyMatrix& matrix, std::size_t n);

/// Fraction of scores strictly above delta.
double cur(std::span<const double> scores, double delta);

/// (a_ecc - a_edge) / (a_cloud - a_edge); unclamped.
double acci(double a_ecc, double a_edge, double a_cloud);

}  // namespace ecc
