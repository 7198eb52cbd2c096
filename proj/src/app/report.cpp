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

#include "ecc/app/report.hpp"

#include <charconv>
#include <fstream>

namespace ecc::app {

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  if (res.ec != std::errc()) throw NumericError("format_number: conversion failed");
  return {buf, res.ptr};
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ArgumentError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw ArgumentError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string cost_comment(const CostConstants& c) {
  return "# costs e_mac_pj=" + format_number(c.e_mac_pj) + " e_ac_pj=" + format_number(c.e_ac_pj) +
         " e_byte_pj=" + format_number(c.e_byte_pj) + " bandwidth_bytes_per_s=" +
         format_number(c.bandwidth_bytes_per_s) + " rtt_ms=" + format_number(c.rtt_ms) +
         " edge_throughput_ops_per_s=" + format_number(c.edge_throughput_ops_per_s) +
         " cloud_throughput_macs_per_s=" + format_number(c.cloud_throughput_macs_per_s) +
         " bytes_per_feature=" + format_number(c.bytes_per_feature) + "\r\n";
}

namespace {

std::string quote(const std::string& cell) {
  if (cell.find_first_of(",\"\r\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char ch : cell) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string join(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += quote(cells[i]);
  }
  return line + "\r\n";
}

std::string num(double v) { return format_number(v); }
std::string num(std::size_t v) { return std::to_string(v); }

}  // namespace

CsvTable::CsvTable(const CostConstants& costs, std::vector<std::string> header)
    : width_(header.size()), text_(cost_comment(costs) + join(header)) {}

CsvTable& CsvTable::row(std::vector<std::string> cells) {
  if (cells.size() != width_) throw ArgumentError("CsvTable: row width does not match header");
  text_ += join(cells);
  ++rows_;
  return *this;
}

CsvTable accuracy_matrix_table(const AccuracyMatrix& matrix, const CostConstants& costs) {
  std::vector<std::string> header{"after_task"};
  for (std::size_t m = 1; m <= matrix.num_tasks(); ++m) header.push_back("task" + std::to_string(m));
  CsvTable t(costs, header);
  for (std::size_t n = 1; n <= matrix.num_tasks(); ++n) {
    std::vector<std::string> cells{std::to_string(n)};
    for (std::size_t m = 1; m <= matrix.num_tasks(); ++m) {
      const auto v = matrix.get(n, m);
      cells.push_back(v ? num(*v) : "");
    }
    t.row(cells);
  }
  return t;
}

CsvTable per_task_table(const LifecycleResult& r, const CostConstants& costs) {
  CsvTable t(costs, {"task", "accuracy", "cur", "mean_energy_mJ", "mean_latency_ms", "buffer_size", "avg_edge_accuracy",
                     "cur_task1_before_update", "cur_task1_after_update"});
  for (std::size_t i = 0; i < r.reports.size(); ++i) {
    const auto& rep = r.reports[i];
    const auto& rec = r.tasks.at(i);
    t.row({std::to_string(rec.task), num(rep.accuracy), num(rep.cur), num(rep.mean_energy_mj),
           num(rep.mean_latency_ms), num(rep.buffer_size), num(rec.avg_accuracy), num(rec.cur_task1_before),
           num(rec.cur_task1_after)});
  }
  return t;
}

CsvTable outcomes_table(const ExecutionReport& report, const CostConstants& costs) {
  CsvTable t(costs, {"index", "route", "score", "prediction", "label", "energy_mJ", "latency_ms"});
  for (std::size_t i = 0; i < report.outcomes.size(); ++i) {
    const auto& o = report.outcomes[i];
    t.row({num(i), to_string(o.route), num(o.score), std::to_string(o.prediction), std::to_string(o.label),
           num(o.cost.total_energy_mj()), num(o.cost.total_latency_ms())});
  }
  return t;
}

FrontierRow summarize_frontier(double delta, const LifecycleResult& r) {
  FrontierRow row;
  row.delta = delta;
  std::size_t n = 0, hit = 0, edge_hit = 0, cloud_routed = 0;
  double energy = 0.0, latency = 0.0, cloud_hits = 0.0;
  for (std::size_t i = 0; i < r.reports.size(); ++i) {
    const auto& rep = r.reports[i];
    for (const auto& o : rep.outcomes) {
      ++n;
      hit += o.prediction == o.label;
      edge_hit += o.edge_prediction == o.label;
      cloud_routed += o.route == Route::Cloud;
      energy += o.cost.total_energy_mj();
      latency += o.cost.total_latency_ms();
    }
    cloud_hits += r.tasks.at(i).exec_cloud_accuracy * static_cast<double>(rep.outcomes.size());
  }
  if (n == 0) throw ArgumentError("summarize_frontier: lifecycle produced no outcomes");
  const double total = static_cast<double>(n);
  row.accuracy = static_cast<double>(hit) / total;
  row.cur = static_cast<double>(cloud_routed) / total;
  row.mean_energy_mj = energy / total;
  row.mean_latency_ms = latency / total;
  row.edge_accuracy = static_cast<double>(edge_hit) / total;
  row.cloud_accuracy = cloud_hits / total;
  try {
    row.acci = acci(row.accuracy, row.edge_accuracy, row.cloud_accuracy);
  } catch (const UndefinedMetricError&) {
    row.acci.reset();
  }
  return row;
}

CsvTable frontier_table(const std::vector<FrontierRow>& rows, const CostConstants& costs) {
  CsvTable t(costs, {"delta", "accuracy", "cur", "mean_energy_mJ", "mean_latency_ms", "edge_accuracy", "cloud_accuracy",
                     "acci"});
  for (const auto& r : rows)
    t.row({num(r.delta), num(r.accuracy), num(r.cur), num(r.mean_energy_mj), num(r.mean_latency_ms),
           num(r.edge_accuracy), num(r.cloud_accuracy), r.acci ? num(*r.acci) : ""});
  return t;
}

CsvTable ablation_table(const std::vector<AblationRow>& rows, const CostConstants& costs) {
  CsvTable t(costs, {"seed", "lambda1", "lambda2", "task1_accuracy"});
  for (const auto& r : rows)
    t.row({std::to_string(r.seed), num(r.lambda1), num(r.lambda2), num(r.task1_accuracy)});
  return t;
}

}  // namespace ecc::app
