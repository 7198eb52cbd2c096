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

// Ambiguity filter: normalized entropy of the edge prediction and the
// threshold routing rule (ties stay on the edge).

#include "ecc/nn.hpp"

namespace ecc {

struct FilterConfig {
  double delta = 0.3;

  void validate() const {
    if (!(delta >= 0.0 && delta <= 1.0)) throw ArgumentError("FilterConfig: delta must lie in [0,1]");
  }
};

struct RoutingDecision {
  double score = 0.0;
  Route route = Route::Edge;
};

/// -sum_k p_k ln p_k / ln K over the temperature-1 softmax, with 0 ln 0 = 0,
/// clamped to [0,1].
template <typename Scalar>
Scalar normalized_entropy(const VecX<Scalar>& logits, Eigen::Index num_classes) {
  if (num_classes < 2) throw ArgumentError("normalized_entropy: need at least two classes");
  if (logits.size() != num_classes)
    throw ArgumentError("normalized_entropy: logits length " + std::to_string(logits.size()) +
                        " != class count " + std::to_string(num_classes));
  const VecX<Scalar> p = softmax(logits);
  // Equal logits are exactly maximal entropy; summing K rounded terms is not.
  if (logits.maxCoeff() == logits.minCoeff()) return Scalar(1);
  Scalar h(0);
  for (Eigen::Index k = 0; k < p.size(); ++k)
    if (p(k) > Scalar(0)) h -= p(k) * std::log(p(k));
  const Scalar s = h / std::log(static_cast<Scalar>(num_classes));
  return std::clamp(s, Scalar(0), Scalar(1));
}

template <typename Scalar>
Scalar normalized_entropy(const VecX<Scalar>& logits) {
  return normalized_entropy(logits, logits.size());
}

template <typename Scalar>
RoutingDecision route(const VecX<Scalar>& logits, const FilterConfig& cfg) {
  cfg.validate();
  RoutingDecision d;
  d.score = static_cast<double>(normalized_entropy(logits));
  d.route = d.score <= cfg.delta ? Route::Edge : Route::Cloud;
  return d;
}

}  // namespace ecc
