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

#include "ecc/costs.hpp"

namespace ecc {

void CostConstants::validate() const {
  for (double v : {e_mac_pj, e_ac_pj, e_byte_pj, bandwidth_bytes_per_s, rtt_ms, edge_throughput_ops_per_s,
                   cloud_throughput_macs_per_s, bytes_per_feature})
    if (!(v > 0) || !std::isfinite(v)) throw ArgumentError("CostConstants: every constant must be positive");
  if (!(e_mac_pj > e_ac_pj)) throw ArgumentError("CostConstants: e_mac must exceed e_ac");
}

EdgeOps edge_ops(const SnnModel<double>& model, const std::optional<SpikeTrace<double>>& trace) {
  if (!trace) throw StateError("edge_ops: no spike trace recorded for this forward pass");
  EdgeOps ops;
  ops.macs = static_cast<double>(model.encoding().macs()) * trace->time_steps * static_cast<double>(trace->batch_size);
  for (std::size_t l = 0; l < trace->spike_counts.size(); ++l)
    ops.acs += trace->spike_counts[l] * static_cast<double>(model.fan_out(l));
  return ops;
}

double edge_energy(const SnnModel<double>& model, const std::optional<SpikeTrace<double>>& trace,
                   const CostConstants& c) {
  const auto ops = edge_ops(model, trace);
  return (c.e_mac_pj * ops.macs + c.e_ac_pj * ops.acs) * kPicoToMilli;
}

double cloud_energy(const MlpModel<double>& model, const CostConstants& c) {
  return c.e_mac_pj * static_cast<double>(model.total_macs()) * kPicoToMilli;
}

CommCost comm_cost(Eigen::Index num_features, const CostConstants& c) {
  if (num_features < 0) throw ArgumentError("comm_cost: negative feature count");
  const double payload = static_cast<double>(num_features) * c.bytes_per_feature;
  return {c.e_byte_pj * payload * kPicoToMilli, c.rtt_ms + payload / c.bandwidth_bytes_per_s * 1000.0};
}

double path_latency(Route route, double edge_ops, double cloud_macs, const CommCost& comm, const CostConstants& c) {
  const double edge = edge_ops / c.edge_throughput_ops_per_s * 1000.0;
  if (route == Route::Edge) return edge;
  return edge + comm.latency_ms + cloud_macs / c.cloud_throughput_macs_per_s * 1000.0;
}

}  // namespace ecc
