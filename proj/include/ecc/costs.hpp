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

// Analytic energy/latency model. Edge compute is charged per synaptic
// operation: a MAC for the real-valued encoding layer, an AC per delivered
// spike. The cloud path adds dense MACs plus per-byte upload and a round trip.

#include "ecc/nn.hpp"
#include "ecc/snn.hpp"

namespace ecc {

struct CostConstants {
  double e_mac_pj = 4.6;
  double e_ac_pj = 0.9;
  double e_byte_pj = 50.0;
  double bandwidth_bytes_per_s = 1e6;
  double rtt_ms = 10.0;
  double edge_throughput_ops_per_s = 1e9;
  double cloud_throughput_macs_per_s = 1e12;
  double bytes_per_feature = 4.0;

  void validate() const;
};

inline constexpr double kPicoToMilli = 1e-9;

struct CostReport {
  double compute_energy_mj = 0.0;
  double comm_energy_mj = 0.0;
  double compute_latency_ms = 0.0;
  double comm_latency_ms = 0.0;

  double total_energy_mj() const { return compute_energy_mj + comm_energy_mj; }
  double total_latency_ms() const { return compute_latency_ms + comm_latency_ms; }

  CostReport& operator+=(const CostReport& o) {
    compute_energy_mj += o.compute_energy_mj;
    comm_energy_mj += o.comm_energy_mj;
    compute_latency_ms += o.compute_latency_ms;
    comm_latency_ms += o.comm_latency_ms;
    return *this;
  }
};

struct EdgeOps {
  double macs = 0.0;
  double acs = 0.0;
  double total() const { return macs + acs; }
};

/// Synaptic operations of one recorded forward pass (whole batch).
EdgeOps edge_ops(const SnnModel<double>& model, const std::optional<SpikeTrace<double>>& trace);

double edge_energy(const SnnModel<double>& model, const std::optional<SpikeTrace<double>>& trace,
                   const CostConstants& c);

double cloud_energy(const MlpModel<double>& model, const CostConstants& c);

struct CommCost {
  double energy_mj = 0.0;
  double latency_ms = 0.0;
};

CommCost comm_cost(Eigen::Index num_features, const CostConstants& c);

/// Edge: edge compute only. Cloud: edge compute, then upload, then cloud
/// compute, strictly sequential.
double path_latency(Route route, double edge_ops, double cloud_macs, const CommCost& comm, const CostConstants& c);

}  // namespace ecc
