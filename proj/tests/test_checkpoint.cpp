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

#include <doctest.h>

#include <array>
#include <fstream>

#include "ecc/checkpoint.hpp"
#include "oracles.hpp"

using namespace ecc;

namespace {

std::filesystem::path tmp(const std::string& name) { return std::filesystem::temp_directory_path() / ("ecc_ckpt_" + name); }

}  // namespace

TEST_CASE("MLP checkpoint round trip is bit-exact") {
  const std::array<Eigen::Index, 4> arch{5, 7, 6, 3};
  const auto m = make_mlp<double>(arch, 1, 42);
  save_checkpoint(m, 42, tmp("mlp.json"));
  const auto c = load_mlp_checkpoint(tmp("mlp.json"));
  CHECK(c.seed == 42);
  CHECK(c.model.feature_tap_index == 1);
  REQUIRE(c.model.layers.size() == 3);
  for (std::size_t l = 0; l < 3; ++l) {
    CHECK(c.model.layers[l].weights == m.layers[l].weights);
    CHECK(c.model.layers[l].bias == m.layers[l].bias);
    CHECK(c.model.layers[l].activation == m.layers[l].activation);
  }
  Rng rng(1);
  const MatXd x = oracle::random_matrix<double>(4, 5, rng);
  CHECK(ann_forward(c.model, x).logits == ann_forward(m, x).logits);
}

TEST_CASE("SNN checkpoint round trip keeps the LIF block, classes and outputs") {
  LifConfig<double> lif;
  lif.tau = 0.3;
  lif.time_steps = 6;
  lif.v_reset = -0.25;
  const std::array<Eigen::Index, 4> arch{4, 9, 5, 3};
  const EdgeClassifier e{make_snn<double>(arch, lif, 1, 7, 4.0), {5, 0, 2}};
  save_checkpoint(e, 7, tmp("snn.json"));
  const auto c = load_edge_checkpoint(tmp("snn.json"));
  CHECK(c.seed == 7);
  CHECK(c.model.classes == e.classes);
  CHECK(c.model.snn.tap_layer_index == 1);
  CHECK(c.model.snn.layers[1].lif.tau == 0.3);
  CHECK(c.model.snn.time_steps() == 6);
  CHECK(c.model.snn.layers[0].lif.v_reset == -0.25);
  Rng rng(2);
  const MatXd x = oracle::random_matrix<double>(5, 4, rng, 0, 1);
  CHECK(snn_forward(c.model.snn, x, false).logits == snn_forward(e.snn, x, false).logits);
}

TEST_CASE("checkpoint errors") {
  std::ofstream(tmp("bad.json")) << "{ not json";
  CHECK_THROWS_AS(load_mlp_checkpoint(tmp("bad.json")), ParseError);
  std::ofstream(tmp("nover.json")) << R"({"kind":"mlp"})";
  CHECK_THROWS_AS(load_mlp_checkpoint(tmp("nover.json")), ParseError);
  std::ofstream(tmp("v9.json")) << R"({"version":9,"kind":"mlp"})";
  CHECK_THROWS_AS(load_mlp_checkpoint(tmp("v9.json")), ParseError);

  const std::array<Eigen::Index, 3> arch{2, 3, 2};
  save_checkpoint(make_mlp<double>(arch, 0, 1), 1, tmp("kind.json"));
  CHECK_THROWS_AS(load_edge_checkpoint(tmp("kind.json")), ParseError);

  std::ofstream(tmp("short.json")) << R"({"version":1,"kind":"mlp","seed":1,"arch":[2,2],"feature_tap_index":0,
    "layers":[{"in":2,"out":2,"activation":"identity","weights":[1,2,3],"bias":[0,0]}]})";
  CHECK_THROWS_AS(load_mlp_checkpoint(tmp("short.json")), ParseError);
  CHECK_THROWS_AS(load_mlp_checkpoint(tmp("missing.json")), ArgumentError);
}
