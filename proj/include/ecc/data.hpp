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

// Labeled datasets, the synthetic blob generator, the CSV loader, and
// class-incremental task streams ("B-u, Inc-v").

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ecc/types.hpp"

namespace ecc {

struct Sample {
  VecXd features;
  int label = 0;
};

/// One sample per row of `features`; labels are global class ids.
struct Dataset {
  MatXd features;
  std::vector<int> labels;
  int num_classes = 0;
  std::string name;

  Eigen::Index size() const { return features.rows(); }
  Eigen::Index dim() const { return features.cols(); }
  bool empty() const { return labels.empty(); }

  Sample sample(Eigen::Index i) const { return {features.row(i).transpose(), labels[static_cast<std::size_t>(i)]}; }

  Dataset subset(std::span<const Eigen::Index> rows, std::string subset_name = {}) const;

  /// Rows whose label is one of `classes`, in original order.
  Dataset filter_classes(std::span<const int> classes) const;

  /// Concatenation of datasets sharing D and K.
  static Dataset concat(std::span<const Dataset> parts, std::string concat_name = {});
};

Dataset generate_blobs(std::uint64_t seed, int num_classes, int dim, int n_per_class, double spread);

/// Header-free `label,f_1,...,f_D` rows. K is inferred as max label + 1.
Dataset load_csv(const std::filesystem::path& path);
void save_csv(const Dataset& dataset, const std::filesystem::path& path);

struct TaskSplit {
  int index = 1;  // 1-based
  std::vector<int> class_ids;
  Dataset train;
  Dataset test;
};

struct TaskStream {
  std::vector<TaskSplit> splits;
  int base_classes = 0;       // u
  int increment_classes = 0;  // v
  std::vector<int> class_order;  // every class, in the order tasks introduce them

  std::size_t size() const { return splits.size(); }
};

/// Shuffles class order by `seed`, cuts it into a base task of `u` classes
/// followed by tasks of `v` classes (u == 0: equal tasks of v classes), and
/// splits every class's samples into train/test by `test_fraction`.
TaskStream make_task_stream(const Dataset& dataset, int u, int v, double test_fraction, std::uint64_t seed);

}  // namespace ecc
