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

#include "ecc/data.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ecc {

Dataset Dataset::subset(std::span<const Eigen::Index> rows, std::string subset_name) const {
  Dataset out;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), dim());
  out.labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.features.row(static_cast<Eigen::Index>(i)) = features.row(rows[i]);
    out.labels.push_back(labels[static_cast<std::size_t>(rows[i])]);
  }
  out.num_classes = num_classes;
  out.name = subset_name.empty() ? name : std::move(subset_name);
  return out;
}

Dataset Dataset::filter_classes(std::span<const int> classes) const {
  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < size(); ++i)
    if (std::find(classes.begin(), classes.end(), labels[static_cast<std::size_t>(i)]) != classes.end())
      rows.push_back(i);
  return subset(rows);
}

Dataset Dataset::concat(std::span<const Dataset> parts, std::string concat_name) {
  if (parts.empty()) throw ArgumentError("Dataset::concat: nothing to concatenate");
  Dataset out;
  out.num_classes = parts.front().num_classes;
  out.name = std::move(concat_name);
  Eigen::Index rows = 0;
  for (const auto& p : parts) {
    if (p.dim() != parts.front().dim() && p.size() > 0) throw ArgumentError("Dataset::concat: dimension mismatch");
    rows += p.size();
  }
  out.features.resize(rows, parts.front().dim());
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    if (p.size() == 0) continue;
    out.features.middleRows(at, p.size()) = p.features;
    out.labels.insert(out.labels.end(), p.labels.begin(), p.labels.end());
    at += p.size();
  }
  return out;
}

Dataset generate_blobs(std::uint64_t seed, int num_classes, int dim, int n_per_class, double spread) {
  if (num_classes < 2) throw ArgumentError("generate_blobs: need K >= 2");
  if (dim < 1) throw ArgumentError("generate_blobs: need D >= 1");
  if (n_per_class < 1) throw ArgumentError("generate_blobs: need n_per_class >= 1");
  if (!(spread > 0) || !std::isfinite(spread)) throw ArgumentError("generate_blobs: spread must be positive");

  Rng rng(seed);
  std::uniform_real_distribution<double> center_dist(0.0, 1.0);
  MatXd centers(num_classes, dim);
  for (int k = 0; k < num_classes; ++k)
    for (int d = 0; d < dim; ++d) centers(k, d) = center_dist(rng);

  std::normal_distribution<double> noise(0.0, spread);
  Dataset out;
  out.num_classes = num_classes;
  out.name = "blobs";
  out.features.resize(static_cast<Eigen::Index>(num_classes) * n_per_class, dim);
  Eigen::Index row = 0;
  for (int k = 0; k < num_classes; ++k)
    for (int i = 0; i < n_per_class; ++i, ++row) {
      for (int d = 0; d < dim; ++d) out.features(row, d) = std::clamp(centers(k, d) + noise(rng), 0.0, 1.0);
      out.labels.push_back(k);
    }
  return out;
}

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("load_csv: cannot open " + path.string());

  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::string line;
  std::size_t row_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++row_no;
    if (trim(line).empty()) continue;
    const auto fields = split_commas(line);
    const std::string where = path.string() + ": row " + std::to_string(row_no);
    if (fields.size() < 2) throw ParseError(where + ": expected label and at least one feature");
    if (width == 0) width = fields.size();
    if (fields.size() != width)
      throw ParseError(where + ": has " + std::to_string(fields.size() - 1) + " features, expected " +
                       std::to_string(width - 1));

    const auto label_text = trim(fields[0]);
    int label = 0;
    const auto [lp, lec] = std::from_chars(label_text.data(), label_text.data() + label_text.size(), label);
    if (lec != std::errc() || lp != label_text.data() + label_text.size() || label < 0)
      throw ParseError(where + ": label '" + std::string(label_text) + "' is not a non-negative integer");

    std::vector<double> feats;
    feats.reserve(width - 1);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      const auto text = trim(fields[i]);
      double v = 0;
      const auto [fp, fec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (fec != std::errc() || fp != text.data() + text.size() || !std::isfinite(v))
        throw ParseError(where + ": feature " + std::to_string(i) + " '" + std::string(text) + "' is not a number");
      feats.push_back(v);
    }
    rows.push_back(std::move(feats));
    labels.push_back(label);
  }
  if (rows.empty()) throw ArgumentError("load_csv: " + path.string() + " contains no samples");

  Dataset out;
  out.name = path.stem().string();
  out.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width - 1));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      out.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  out.labels = std::move(labels);
  out.num_classes = *std::max_element(out.labels.begin(), out.labels.end()) + 1;
  return out;
}

void save_csv(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("save_csv: cannot write " + path.string());
  std::ostringstream buf;
  buf.precision(17);
  for (Eigen::Index i = 0; i < dataset.size(); ++i) {
    buf << dataset.labels[static_cast<std::size_t>(i)];
    for (Eigen::Index d = 0; d < dataset.dim(); ++d) buf << ',' << dataset.features(i, d);
    buf << '\n';
  }
  out << buf.str();
}

TaskStream make_task_stream(const Dataset& dataset, int u, int v, double test_fraction, std::uint64_t seed) {
  const int k_total = dataset.num_classes;
  if (u < 0) throw ArgumentError("make_task_stream: u must be >= 0");
  if (v < 1) throw ArgumentError("make_task_stream: v must be >= 1");
  if (u + v > k_total)
    throw ArgumentError("make_task_stream: u + v = " + std::to_string(u + v) + " exceeds " +
                        std::to_string(k_total) + " classes");
  if ((k_total - u) % v != 0)
    throw ArgumentError("make_task_stream: " + std::to_string(k_total - u) + " remaining classes not divisible by " +
                        std::to_string(v));
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw ArgumentError("make_task_stream: test_fraction must lie in (0,1)");

  Rng rng(seed);
  TaskStream stream;
  stream.base_classes = u;
  stream.increment_classes = v;
  stream.class_order.resize(static_cast<std::size_t>(k_total));
  std::iota(stream.class_order.begin(), stream.class_order.end(), 0);
  std::shuffle(stream.class_order.begin(), stream.class_order.end(), rng);

  std::vector<std::vector<int>> groups;
  std::size_t at = 0;
  if (u > 0) {
    groups.emplace_back(stream.class_order.begin(), stream.class_order.begin() + u);
    at = static_cast<std::size_t>(u);
  }
  while (at < stream.class_order.size()) {
    groups.emplace_back(stream.class_order.begin() + static_cast<std::ptrdiff_t>(at),
                        stream.class_order.begin() + static_cast<std::ptrdiff_t>(at) + v);
    at += static_cast<std::size_t>(v);
  }

  for (std::size_t g = 0; g < groups.size(); ++g) {
    std::vector<Eigen::Index> train_rows, test_rows;
    for (int cls : groups[g]) {
      std::vector<Eigen::Index> rows;
      for (Eigen::Index i = 0; i < dataset.size(); ++i)
        if (dataset.labels[static_cast<std::size_t>(i)] == cls) rows.push_back(i);
      std::shuffle(rows.begin(), rows.end(), rng);
      const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(rows.size())));
      test_rows.insert(test_rows.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_test));
      train_rows.insert(train_rows.end(), rows.begin() + static_cast<std::ptrdiff_t>(n_test), rows.end());
    }
    std::sort(train_rows.begin(), train_rows.end());
    std::sort(test_rows.begin(), test_rows.end());
    TaskSplit split;
    split.index = static_cast<int>(g) + 1;
    split.class_ids = groups[g];
    split.train = dataset.subset(train_rows, dataset.name + "/task" + std::to_string(g + 1) + "/train");
    split.test = dataset.subset(test_rows, dataset.name + "/task" + std::to_string(g + 1) + "/test");
    stream.splits.push_back(std::move(split));
  }
  return stream;
}

}  // namespace ecc
