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

// CSV report emission. Every file starts with one `#` line naming the cost
// constants in force, then an RFC-4180 header row. Numbers use the shortest
// text that parses back to the same double, so equal runs give equal bytes.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ecc/continual.hpp"

namespace ecc::app {

std::string format_number(double v);

/// Writes via a sibling temp file and rename, so readers never see a partial file.
void write_atomic(const std::filesystem::path& path, const std::string& content);

class CsvTable {
 public:
  CsvTable(const CostConstants& costs, std::vector<std::string> header);

  CsvTable& row(std::vector<std::string> cells);
  std::size_t rows() const { return rows_; }
  const std::string& str() const { return text_; }

 private:
  std::size_t width_;
  std::size_t rows_ = 0;
  std::string text_;
};

std::string cost_comment(const CostConstants& costs);

CsvTable accuracy_matrix_table(const AccuracyMatrix& matrix, const CostConstants& costs);
CsvTable per_task_table(const LifecycleResult& result, const CostConstants& costs);
CsvTable outcomes_table(const ExecutionReport& report, const CostConstants& costs);

/// One delta of a sweep, pooled over every execution outcome of its lifecycle.
struct FrontierRow {
  double delta = 0.0;
  double accuracy = 0.0;       // collaborative accuracy
  double cur = 0.0;
  double mean_energy_mj = 0.0;
  double mean_latency_ms = 0.0;
  double edge_accuracy = 0.0;  // edge argmax on the same samples
  double cloud_accuracy = 0.0;
  std::optional<double> acci;  // empty when edge and cloud tie
};

FrontierRow summarize_frontier(double delta, const LifecycleResult& result);
CsvTable frontier_table(const std::vector<FrontierRow>& rows, const CostConstants& costs);

struct AblationRow {
  std::uint64_t seed = 0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double task1_accuracy = 0.0;
};

CsvTable ablation_table(const std::vector<AblationRow>& rows, const CostConstants& costs);

}  // namespace ecc::app
