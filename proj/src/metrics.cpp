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

#include "ecc/metrics.hpp"

#include <numeric>
#include <string>

namespace ecc {

AccuracyMatrix::AccuracyMatrix(std::size_t num_tasks) : rows_(num_tasks) {
  for (std::size_t n = 0; n < num_tasks; ++n) rows_[n].resize(n + 1);
}

void AccuracyMatrix::set(std::size_t n, std::size_t m, double accuracy) {
  if (n < 1 || n > rows_.size() || m < 1 || m > n)
    throw ArgumentError("AccuracyMatrix: entry (" + std::to_string(n) + "," + std::to_string(m) +
                        ") outside the lower triangle");
  if (!(accuracy >= 0.0 && accuracy <= 1.0)) throw ArgumentError("AccuracyMatrix: accuracy must lie in [0,1]");
  rows_[n - 1][m - 1] = accuracy;
}

std::optional<double> AccuracyMatrix::get(std::size_t n, std::size_t m) const {
  if (n < 1 || n > rows_.size() || m < 1 || m > n) return std::nullopt;
  return rows_[n - 1][m - 1];
}

bool AccuracyMatrix::row_complete(std::size_t n) const {
  if (n < 1 || n > rows_.size()) return false;
  for (const auto& e : rows_[n - 1])
    if (!e) return false;
  return true;
}

std::vector<double> AccuracyMatrix::row(std::size_t n) const {
  if (!row_complete(n)) throw StateError("AccuracyMatrix: row " + std::to_string(n) + " is incomplete");
  std::vector<double> out;
  for (const auto& e : rows_[n - 1]) out.push_back(*e);
  return out;
}

double avg_accuracy(const AccuracyMatrix& matrix, std::size_t n) {
  const auto r = matrix.row(n);
  return std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size());
}

double cur(std::span<const double> scores, double delta) {
  if (scores.empty()) throw ArgumentError("cur: no scores");
  std::size_t up = 0;
  for (double s : scores)
    if (s > delta) ++up;
  return static_cast<double>(up) / static_cast<double>(scores.size());
}

double acci(double a_ecc, double a_edge, double a_cloud) {
  const double gap = a_cloud - a_edge;
  if (gap == 0.0) throw UndefinedMetricError("acci: cloud and edge accuracies are equal");
  return (a_ecc - a_edge) / gap;
}

}  // namespace ecc
