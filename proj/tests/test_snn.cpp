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

#include "ecc/losses.hpp"
#include "ecc/snn.hpp"
#include "oracles.hpp"

using namespace ecc;

namespace {

LifState<double> scalar_state(double h) {
  return {MatXd(MatXd::Zero(1, 1)), MatXd::Constant(1, 1, h), MatXd(MatXd::Zero(1, 1))};
}

MatXd scalar(double v) { return MatXd::Constant(1, 1, v); }

}  // namespace

TEST_CASE("lif_step: two-step hand trace") {
  LifConfig<double> cfg;  // tau 0.5, threshold 1, reset 0
  const auto s1 = lif_step(scalar_state(0.0), scalar(1.0), cfg);
  CHECK(s1.u(0) == 0.5);
  CHECK(s1.o(0) == 0.0);
  CHECK(s1.h(0) == 0.5);
  const auto s2 = lif_step(s1, scalar(2.0), cfg);
  CHECK(s2.u(0) == 1.25);
  CHECK(s2.o(0) == 1.0);
  CHECK(s2.h(0) == 0.0);
}

TEST_CASE("lif_step: zero input, memoryless tau, threshold tie, bad input") {
  LifConfig<double> cfg;
  auto s = scalar_state(0.0);
  for (int t = 0; t < 20; ++t) {
    s = lif_step(s, scalar(0.0), cfg);
    CHECK(s.o(0) == 0.0);
    CHECK(s.h(0) == 0.0);
  }

  cfg.tau = 1.0;
  auto m = scalar_state(0.7);
  for (double i : {0.3, 0.9, -2.0, 5.0}) {
    m = lif_step(m, scalar(i), cfg);
    CHECK(m.u(0) == i);
  }

  cfg.tau = 1.0;
  CHECK(lif_step(scalar_state(0.0), scalar(1.0), cfg).o(0) == 1.0);  // fires at exact threshold

  CHECK_THROWS_AS(lif_step(scalar_state(0.0), scalar(std::nan("")), cfg), NumericError);
  CHECK_THROWS_AS(lif_step(scalar_state(0.0), MatXd(MatXd::Zero(1, 2)), cfg), ArgumentError);

  LifConfig<double> bad;
  bad.v_reset = 2.0;
  CHECK_THROWS_AS(bad.validate(), ArgumentError);
  bad = {};
  bad.tau = 0.0;
  CHECK_THROWS_AS(bad.validate(), ArgumentError);
}

TEST_CASE("lif_step property: binary spikes and exact reset over random trajectories") {
  Rng rng(17);
  std::uniform_real_distribution<double> cur(-1.0, 3.0), tau(0.05, 1.0), thr(0.2, 2.0);
  int steps = 0;
  for (int traj = 0; traj < 100; ++traj) {
    LifConfig<double> cfg;
    cfg.tau = tau(rng);
    cfg.v_threshold = thr(rng);
    cfg.v_reset = cfg.v_threshold - 1.5;
    auto s = LifState<double>::resting(1, 10);
    for (int t = 0; t < 10; ++t) {
      MatXd i(1, 10);
      for (auto& v : i.reshaped()) v = cur(rng);
      s = lif_step(s, i, cfg);
      for (Eigen::Index k = 0; k < 10; ++k, ++steps) {
        CHECK((s.o(k) == 0.0 || s.o(k) == 1.0));
        if (s.o(k) == 1.0) CHECK(s.h(k) == cfg.v_reset);
        else CHECK(s.h(k) == s.u(k));
      }
    }
  }
  CHECK(steps == 10000);
}

TEST_CASE("lif_step property: leak bound with nonnegative bounded input") {
  Rng rng(23);
  std::uniform_real_distribution<double> tau(0.01, 1.0), imax(0.1, 5.0), unit(0.0, 1.0);
  for (int traj = 0; traj < 200; ++traj) {
    LifConfig<double> cfg;
    cfg.tau = tau(rng);
    const double i_max = imax(rng);
    const double bound = std::max(cfg.v_threshold + cfg.tau * i_max, i_max);
    auto s = LifState<double>::resting(1, 8);
    for (int t = 0; t < 50; ++t) {
      MatXd i(1, 8);
      for (auto& v : i.reshaped()) v = unit(rng) * i_max;
      s = lif_step(s, i, cfg);
      CHECK(s.u.maxCoeff() <= bound + 1e-12);
    }
  }
}

TEST_CASE("snn_forward: silent network, memoryless T invariance, determinism") {
  Rng rng(2);
  const std::array<Eigen::Index, 3> arch{3, 4, 2};
  LifConfig<double> lif;

  auto silent = make_snn<double>(arch, lif, 0, 1);
  silent.layers[0].synapses.weights.setZero();
  silent.layers[0].synapses.bias.setZero();
  const MatXd x = oracle::random_matrix<double>(5, 3, rng, 0, 1);
  const auto out = snn_forward(silent, x, true);
  for (double c : out.trace->spike_counts) CHECK(c == 0.0);
  for (Eigen::Index n = 0; n < 5; ++n) CHECK(out.logits.row(n).transpose() == silent.readout.bias);

  lif.tau = 1.0;
  lif.time_steps = 1;
  auto one = make_snn<double>(arch, lif, 0, 3);
  one.layers[0].synapses.weights.setZero();
  one.layers[0].synapses.bias = VecXd::Constant(4, 5.0);
  auto two = one;
  for (auto& l : two.layers) l.lif.time_steps = 2;
  const auto f1 = snn_forward(one, x, true);
  const auto f2 = snn_forward(two, x, true);
  CHECK(f1.trace->spikes[0][0] == f2.trace->spikes[0][0]);
  CHECK(f2.trace->spikes[0][0] == f2.trace->spikes[0][1]);
  CHECK(f1.logits == f2.logits);

  const auto model = make_snn<double>(arch, LifConfig<double>{}, 0, 8, 4.0);
  const auto a = snn_forward(model, x, true);
  const auto b = snn_forward(model, x, true);
  CHECK(a.logits == b.logits);
  CHECK(a.trace->spike_counts == b.trace->spike_counts);
  CHECK(a.trace->tap_sum == b.trace->tap_sum);

  CHECK_THROWS_AS(snn_forward(model, MatXd(MatXd::Zero(1, 4)), false), ArgumentError);
}

TEST_CASE("snn_forward: a row scores the same alone and inside a batch") {
  Rng rng(4);
  const std::array<Eigen::Index, 4> arch{16, 32, 24, 5};
  const auto model = make_snn<double>(arch, LifConfig<double>{}, 0, 2, 4.0);
  const MatXd x = oracle::random_matrix<double>(37, 16, rng, 0, 1);
  const MatXd batch = snn_forward(model, x, false).logits;
  for (Eigen::Index n = 0; n < x.rows(); ++n) CHECK(snn_forward(model, MatXd(x.row(n)), false).logits.row(0) == batch.row(n));
}

TEST_CASE("spike trace counts equal the recorded spikes") {
  Rng rng(6);
  const std::array<Eigen::Index, 4> arch{4, 6, 5, 3};
  const auto model = make_snn<double>(arch, LifConfig<double>{}, 1, 5, 6.0);
  const auto out = snn_forward(model, oracle::random_matrix<double>(8, 4, rng, 0, 1), true);
  for (std::size_t l = 0; l < 2; ++l) {
    double total = 0;
    for (const auto& s : out.trace->spikes[l]) total += s.sum();
    CHECK(total == out.trace->spike_counts[l]);
  }
  MatXd tap = MatXd(MatXd::Zero(8, 5));
  for (const auto& s : out.trace->spikes[1]) tap += s;
  CHECK(tap == out.trace->tap_sum);
}

namespace {

using R = long double;

/// Loss touching every path: CE on logits plus a fixed linear functional of
/// the summed tap spikes.
struct SoftProbe {
  SnnModel<R> model;
  MatX<R> x;
  std::vector<int> labels;
  MatX<R> tap_weights;

  R loss() const {
    const auto f = snn_forward(model, x, true);
    return cross_entropy(softmax_rows(f.logits), labels) + (f.trace->tap_sum.array() * tap_weights.array()).sum();
  }

  SnnGradients<R> grads() const {
    const auto f = snn_forward(model, x, true);
    const MatX<R> d_logits = cross_entropy_logit_grad(softmax_rows(f.logits), labels);
    return snn_backward(model, x, f.trace, d_logits, &tap_weights);
  }
};

SoftProbe make_probe(std::span<const Eigen::Index> arch, std::size_t tap, std::uint64_t seed) {
  LifConfig<R> lif;
  lif.mode = SurrogateMode::Soft;
  lif.time_steps = 3;
  Rng rng(seed);
  SoftProbe p{make_snn<R>(arch, lif, tap, seed, 4.0), oracle::random_matrix<R>(5, arch[0], rng, 0, 1), {}, {}};
  for (int n = 0; n < 5; ++n) p.labels.push_back(n % static_cast<int>(arch.back()));
  p.tap_weights = oracle::random_matrix<R>(5, arch[tap + 1], rng, -0.3, 0.3);
  return p;
}

double worst_gradient_error(SoftProbe& p) {
  const auto g = p.grads();
  auto f = [&]() { return p.loss(); };
  double worst = 0;
  auto check_layer = [&](DenseLayer<R>& layer, const DenseGrad<R>& grad) {
    for (Eigen::Index i = 0; i < layer.weights.size(); ++i)
      worst = std::max(worst, oracle::rel_error(grad.d_weights(i), oracle::central_difference<R>(f, layer.weights(i))));
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i)
      worst = std::max(worst, oracle::rel_error(grad.d_bias(i), oracle::central_difference<R>(f, layer.bias(i))));
  };
  for (std::size_t l = 0; l < p.model.layers.size(); ++l) check_layer(p.model.layers[l].synapses, g.layers[l]);
  check_layer(p.model.readout, g.readout);
  return worst;
}

}  // namespace

TEST_CASE("snn_backward soft mode: every gradient matches finite differences (D=3, hidden 4, T=3)") {
  const std::array<Eigen::Index, 3> arch{3, 4, 3};
  auto p = make_probe(arch, 0, 31);
  CHECK(worst_gradient_error(p) < 1e-4);
}

TEST_CASE("snn_backward soft mode: two populations with a tap on the first") {
  const std::array<Eigen::Index, 4> arch{3, 5, 4, 3};
  auto p = make_probe(arch, 0, 37);
  CHECK(worst_gradient_error(p) < 1e-4);
}

TEST_CASE("snn_backward: zero upstream gradient gives zero gradients") {
  Rng rng(8);
  const std::array<Eigen::Index, 4> arch{3, 5, 4, 2};
  for (auto mode : {SurrogateMode::Hard, SurrogateMode::Soft}) {
    LifConfig<double> lif;
    lif.mode = mode;
    const auto model = make_snn<double>(arch, lif, 0, 4, 4.0);
    const MatXd x = oracle::random_matrix<double>(6, 3, rng, 0, 1);
    const auto f = snn_forward(model, x, true);
    const auto g = snn_backward(model, x, f.trace, MatXd(MatXd::Zero(6, 2)));
    for (const auto& l : g.layers) {
      CHECK(l.d_weights.isZero(0.0));
      CHECK(l.d_bias.isZero(0.0));
    }
    CHECK(g.readout.d_weights.isZero(0.0));
  }
}

TEST_CASE("snn_backward hard mode: potentials outside the surrogate window block encoding gradients") {
  const std::array<Eigen::Index, 3> arch{3, 4, 2};
  auto model = make_snn<double>(arch, LifConfig<double>{}, 0, 1);
  model.layers[0].synapses.weights.setZero();
  model.layers[0].synapses.bias.setConstant(0.1);  // U climbs to at most 0.1 < V - a/2 = 0.5
  Rng rng(1);
  const MatXd x = oracle::random_matrix<double>(4, 3, rng, 0, 1);
  const auto f = snn_forward(model, x, true);
  for (const auto& u : f.trace->membrane[0]) CHECK((u.array() - 1.0).abs().minCoeff() >= 0.5);
  const auto g = snn_backward(model, x, f.trace, oracle::random_matrix<double>(4, 2, rng));
  CHECK(g.layers[0].d_weights.isZero(0.0));
  CHECK(g.layers[0].d_bias.isZero(0.0));
  CHECK_FALSE(g.readout.d_bias.isZero(0.0));
}

TEST_CASE("snn_backward without a trace is a state error") {
  const std::array<Eigen::Index, 3> arch{3, 4, 2};
  const auto model = make_snn<double>(arch, LifConfig<double>{}, 0, 1);
  const MatXd x = MatXd(MatXd::Zero(2, 3));
  const auto f = snn_forward(model, x, false);
  CHECK_THROWS_AS(snn_backward(model, x, f.trace, MatXd(MatXd::Zero(2, 2))), StateError);
}

TEST_CASE("expand_readout") {
  Rng rng(12);
  const std::array<Eigen::Index, 3> arch{5, 8, 4};
  const auto model = make_snn<double>(arch, LifConfig<double>{}, 0, 3, 6.0);
  const MatXd x = oracle::random_matrix<double>(10, 5, rng, 0, 1);
  const auto grown = expand_readout(model, 6, 99);
  CHECK(grown.num_classes() == 6);
  CHECK(snn_forward(grown, x, false).logits.leftCols(4) == snn_forward(model, x, false).logits);
  CHECK(grown.readout.weights.topRows(4) == model.readout.weights);
  CHECK_THROWS_AS(expand_readout(model, 4, 1), ArgumentError);
  CHECK_THROWS_AS(expand_readout(model, 3, 1), ArgumentError);

  // Symmetric init: the new-class logit on a fixed input averages to zero over seeds.
  const MatXd probe = x.topRows(1);
  const int trials = 4000;
  double sum = 0, sum_sq = 0;
  for (int s = 0; s < trials; ++s) {
    const double z = snn_forward(expand_readout(model, 5, static_cast<std::uint64_t>(s)), probe, false).logits(0, 4);
    sum += z;
    sum_sq += z * z;
  }
  const double mean = sum / trials;
  const double se = std::sqrt((sum_sq / trials - mean * mean) / trials);
  CHECK(std::abs(mean) < 3 * se);
}
