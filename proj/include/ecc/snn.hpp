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

// Edge spiking classifier: leaky integrate-and-fire populations driven by a
// real-valued encoding layer, a time-averaged linear readout, and
// surrogate-gradient backpropagation through time.

#include <optional>
#include <vector>

#include "ecc/nn.hpp"

namespace ecc {

enum class SurrogateMode : std::uint8_t { Hard, Soft };

inline const char* to_string(SurrogateMode m) { return m == SurrogateMode::Hard ? "hard" : "soft"; }

template <typename Scalar>
struct LifConfig {
  Scalar tau = Scalar(0.5);
  Scalar v_threshold = Scalar(1.0);
  Scalar v_reset = Scalar(0.0);
  Scalar surrogate_width = Scalar(1.0);
  int time_steps = 4;
  SurrogateMode mode = SurrogateMode::Hard;

  void validate() const {
    if (!(tau > Scalar(0) && tau <= Scalar(1))) throw ArgumentError("LifConfig: tau must lie in (0,1]");
    if (!(v_reset < v_threshold)) throw ArgumentError("LifConfig: v_reset must be below v_threshold");
    if (!(surrogate_width > Scalar(0))) throw ArgumentError("LifConfig: surrogate width must be positive");
    if (time_steps < 1) throw ArgumentError("LifConfig: need at least one time step");
  }

  /// Spike nonlinearity. Hard mode fires at exact threshold.
  Scalar fire(Scalar u) const {
    if (mode == SurrogateMode::Hard) return u >= v_threshold ? Scalar(1) : Scalar(0);
    return Scalar(1) / (Scalar(1) + std::exp(-(u - v_threshold) / surrogate_width));
  }

  /// dO/dU: rectangular window in hard mode, exact sigmoid slope in soft mode.
  Scalar fire_grad(Scalar u, Scalar o) const {
    if (mode == SurrogateMode::Hard)
      return std::abs(u - v_threshold) < surrogate_width / Scalar(2) ? Scalar(1) / surrogate_width : Scalar(0);
    return o * (Scalar(1) - o) / surrogate_width;
  }
};

/// Membrane state of one population for a batch (rows = samples).
/// u is the potential before firing, h after firing, o the spike output.
template <typename Scalar>
struct LifState {
  MatX<Scalar> u;
  MatX<Scalar> h;
  MatX<Scalar> o;

  static LifState resting(Eigen::Index batch, Eigen::Index neurons) {
    return {MatX<Scalar>::Zero(batch, neurons), MatX<Scalar>::Zero(batch, neurons),
            MatX<Scalar>::Zero(batch, neurons)};
  }
};

/// One LIF update:
///   U(t) = (1 - tau) H(t-1) + tau I(t)
///   O(t) = fire(U(t))
///   H(t) = U(t) (1 - O(t)) + V_r O(t)
template <typename Scalar>
LifState<Scalar> lif_step(const LifState<Scalar>& prev, const MatX<Scalar>& current, const LifConfig<Scalar>& cfg) {
  if (current.rows() != prev.h.rows() || current.cols() != prev.h.cols())
    throw ArgumentError("lif_step: current shape does not match state");
  if (!current.allFinite()) throw NumericError("lif_step: non-finite input current");
  LifState<Scalar> next;
  next.u = (Scalar(1) - cfg.tau) * prev.h + cfg.tau * current;
  next.o = next.u.unaryExpr([&cfg](Scalar v) { return cfg.fire(v); });
  next.h = next.u.cwiseProduct((Scalar(1) - next.o.array()).matrix()) + cfg.v_reset * next.o;
  return next;
}

template <typename Scalar>
struct SpikingLayer {
  DenseLayer<Scalar> synapses;
  LifConfig<Scalar> lif;
};

/// layers[0].synapses is the encoding layer: it maps raw features to the input
/// current of the first LIF population (real-valued MACs). Every later layer
/// is driven by the spikes of the population below it (accumulates only).
template <typename Scalar>
struct SnnModel {
  std::vector<SpikingLayer<Scalar>> layers;
  DenseLayer<Scalar> readout;
  std::size_t tap_layer_index = 0;

  const DenseLayer<Scalar>& encoding() const { return layers.front().synapses; }
  int time_steps() const { return layers.front().lif.time_steps; }
  Eigen::Index input_dim() const { return layers.front().synapses.in_dim(); }
  Eigen::Index num_classes() const { return readout.out_dim(); }
  Eigen::Index tap_dim() const { return layers.at(tap_layer_index).synapses.out_dim(); }

  /// Fan-out of the population feeding layer `i + 1` (or the readout).
  Eigen::Index fan_out(std::size_t population) const {
    return population + 1 < layers.size() ? layers[population + 1].synapses.out_dim() : readout.out_dim();
  }

  void validate() const {
    if (layers.empty()) throw ArgumentError("SnnModel: needs at least one spiking population");
    if (tap_layer_index >= layers.size()) throw ArgumentError("SnnModel: tap layer out of range");
    for (std::size_t i = 0; i < layers.size(); ++i) {
      layers[i].lif.validate();
      if (layers[i].lif.time_steps != time_steps()) throw ArgumentError("SnnModel: populations disagree on T");
      if (i > 0 && layers[i].synapses.in_dim() != layers[i - 1].synapses.out_dim())
        throw ArgumentError("SnnModel: layer widths do not chain");
    }
    if (readout.in_dim() != layers.back().synapses.out_dim())
      throw ArgumentError("SnnModel: readout width does not match last population");
  }
};

template <typename Scalar>
struct SnnGradients {
  std::vector<DenseGrad<Scalar>> layers;
  DenseGrad<Scalar> readout;

  static SnnGradients zeros_like(const SnnModel<Scalar>& m) {
    SnnGradients g;
    for (const auto& l : m.layers) g.layers.push_back(DenseGrad<Scalar>::zeros_like(l.synapses));
    g.readout = DenseGrad<Scalar>::zeros_like(m.readout);
    return g;
  }
};

/// `arch` lists every width: input, each spiking population, classes.
/// `encoding_gain` scales the init range of the encoding layer only.
template <typename Scalar>
SnnModel<Scalar> make_snn(std::span<const Eigen::Index> arch, const LifConfig<Scalar>& lif, std::size_t tap_layer,
                          std::uint64_t seed, double encoding_gain = 1.0) {
  if (arch.size() < 3) throw ArgumentError("make_snn: need input, at least one population and classes");
  for (auto w : arch)
    if (w < 1) throw ArgumentError("make_snn: layer widths must be positive");
  lif.validate();
  Rng rng(seed);
  SnnModel<Scalar> m;
  m.tap_layer_index = tap_layer;
  for (std::size_t i = 0; i + 2 < arch.size(); ++i) {
    const double gain = i == 0 ? encoding_gain : 1.0;
    m.layers.push_back({DenseLayer<Scalar>::uniform(arch[i], arch[i + 1], rng, Activation::Identity, gain), lif});
  }
  m.readout = DenseLayer<Scalar>::uniform(arch[arch.size() - 2], arch.back(), rng);
  m.validate();
  return m;
}

template <typename Scalar>
struct SpikeTrace {
  std::vector<std::vector<MatX<Scalar>>> spikes;    // [population][t] -> batch x neurons
  std::vector<std::vector<MatX<Scalar>>> membrane;  // [population][t] -> U(t)
  std::vector<Scalar> spike_counts;                 // per population, summed over batch and t
  MatX<Scalar> tap_sum;                             // sum_t spikes of the tap population
  Eigen::Index batch_size = 0;
  int time_steps = 0;
};

template <typename Scalar>
struct SnnForward {
  MatX<Scalar> logits;
  std::optional<SpikeTrace<Scalar>> trace;
};

/// Constant-current encoding: the encoding layer output is injected at every
/// step. Logits are the time average of the readout applied to the last
/// population's spikes. Every population starts from H(0) = 0.
template <typename Scalar, typename Derived>
SnnForward<Scalar> snn_forward(const SnnModel<Scalar>& model, const Eigen::MatrixBase<Derived>& batch,
                               bool record_trace) {
  if (batch.cols() != model.input_dim())
    throw ArgumentError("snn_forward: batch has " + std::to_string(batch.cols()) + " features, model expects " +
                        std::to_string(model.input_dim()));
  const Eigen::Index n = batch.rows();
  const int steps = model.time_steps();
  const std::size_t pops = model.layers.size();

  const MatX<Scalar> x = batch.template cast<Scalar>();
  const MatX<Scalar> encoded = affine(x, model.encoding());

  std::vector<LifState<Scalar>> state;
  for (const auto& l : model.layers) state.push_back(LifState<Scalar>::resting(n, l.synapses.out_dim()));

  SnnForward<Scalar> out;
  out.logits = MatX<Scalar>::Zero(n, model.num_classes());
  SpikeTrace<Scalar> trace;
  if (record_trace) {
    trace.spikes.resize(pops);
    trace.membrane.resize(pops);
    trace.spike_counts.assign(pops, Scalar(0));
    trace.tap_sum = MatX<Scalar>::Zero(n, model.tap_dim());
    trace.batch_size = n;
    trace.time_steps = steps;
  }

  MatX<Scalar> readout_sum = MatX<Scalar>::Zero(n, model.readout.in_dim());
  for (int t = 0; t < steps; ++t) {
    for (std::size_t l = 0; l < pops; ++l) {
      const MatX<Scalar> current = l == 0 ? encoded : affine(state[l - 1].o, model.layers[l].synapses);
      state[l] = lif_step(state[l], current, model.layers[l].lif);
      if (record_trace) {
        trace.spikes[l].push_back(state[l].o);
        trace.membrane[l].push_back(state[l].u);
        trace.spike_counts[l] += state[l].o.sum();
        if (l == model.tap_layer_index) trace.tap_sum += state[l].o;
      }
    }
    readout_sum += state.back().o;
  }
  // (1/T) sum_t (O_t W^T + b) == mean(O) W^T + b
  out.logits = affine(MatX<Scalar>(readout_sum / static_cast<Scalar>(steps)), model.readout);
  if (record_trace) out.trace = std::move(trace);
  return out;
}

/// Backpropagation through time. `d_logits` is dLoss/dlogits; `d_tap_sum`,
/// when given, is dLoss/d(sum_t tap spikes) from the feature-alignment head.
///
/// Hard mode replaces dO/dU with the rectangular surrogate and treats the
/// O(t) factor of the reset as a constant. Soft mode differentiates the
/// sigmoid-relaxed system exactly, reset path included.
template <typename Scalar, typename Derived>
SnnGradients<Scalar> snn_backward(const SnnModel<Scalar>& model, const Eigen::MatrixBase<Derived>& batch,
                                  const std::optional<SpikeTrace<Scalar>>& trace, const MatX<Scalar>& d_logits,
                                  const MatX<Scalar>* d_tap_sum = nullptr) {
  if (!trace || trace->spikes.size() != model.layers.size())
    throw StateError("snn_backward: forward trace was not recorded");
  const int steps = trace->time_steps;
  const Eigen::Index n = trace->batch_size;
  if (d_logits.rows() != n || d_logits.cols() != model.num_classes())
    throw ArgumentError("snn_backward: logit gradient shape mismatch");
  if (d_tap_sum && (d_tap_sum->rows() != n || d_tap_sum->cols() != model.tap_dim()))
    throw ArgumentError("snn_backward: tap gradient shape mismatch");

  auto grads = SnnGradients<Scalar>::zeros_like(model);
  const MatX<Scalar> x = batch.template cast<Scalar>();
  const Scalar inv_t = Scalar(1) / static_cast<Scalar>(steps);

  // Readout sees mean spikes of the last population.
  MatX<Scalar> last_mean = MatX<Scalar>::Zero(n, model.readout.in_dim());
  for (const auto& s : trace->spikes.back()) last_mean += s;
  last_mean *= inv_t;
  accumulate_affine_grad(grads.readout, last_mean, d_logits);
  const MatX<Scalar> d_last_spike = inv_t * d_logits * model.readout.weights;

  // d_out[t]: external gradient arriving at the spikes of the current population.
  std::vector<MatX<Scalar>> d_out(static_cast<std::size_t>(steps), d_last_spike);
  for (std::size_t l = model.layers.size(); l-- > 0;) {
    const auto& cfg = model.layers[l].lif;
    const auto& spikes = trace->spikes[l];
    const auto& membrane = trace->membrane[l];
    if (l == model.tap_layer_index && d_tap_sum)
      for (auto& g : d_out) g += *d_tap_sum;

    std::vector<MatX<Scalar>> d_current(static_cast<std::size_t>(steps));
    MatX<Scalar> d_h = MatX<Scalar>::Zero(n, model.layers[l].synapses.out_dim());
    for (int t = steps; t-- > 0;) {
      const auto ti = static_cast<std::size_t>(t);
      const MatX<Scalar>& u = membrane[ti];
      const MatX<Scalar>& o = spikes[ti];
      MatX<Scalar> d_o = d_out[ti];
      if (cfg.mode == SurrogateMode::Soft)
        d_o += d_h.cwiseProduct((cfg.v_reset - u.array()).matrix());
      MatX<Scalar> slope(u.rows(), u.cols());
      for (Eigen::Index i = 0; i < u.size(); ++i) slope(i) = cfg.fire_grad(u(i), o(i));
      const MatX<Scalar> d_u = d_h.cwiseProduct((Scalar(1) - o.array()).matrix()) + d_o.cwiseProduct(slope);
      d_current[ti] = cfg.tau * d_u;
      d_h = (Scalar(1) - cfg.tau) * d_u;
    }

    const auto& synapses = model.layers[l].synapses;
    for (int t = 0; t < steps; ++t) {
      const auto ti = static_cast<std::size_t>(t);
      if (l == 0)
        accumulate_affine_grad(grads.layers[0], x, d_current[ti]);
      else
        accumulate_affine_grad(grads.layers[l], trace->spikes[l - 1][ti], d_current[ti]);
    }
    if (l > 0)
      for (int t = 0; t < steps; ++t) {
        const auto ti = static_cast<std::size_t>(t);
        d_out[ti] = d_current[ti] * synapses.weights;
      }
  }
  return grads;
}

template <typename Scalar>
std::vector<ParamBlock<Scalar>> parameter_blocks(SnnModel<Scalar>& m) {
  std::vector<ParamBlock<Scalar>> out;
  for (auto& l : m.layers) append_blocks(out, l.synapses);
  append_blocks(out, m.readout);
  return out;
}

template <typename Scalar>
std::vector<GradBlock<Scalar>> gradient_blocks(const SnnGradients<Scalar>& g) {
  std::vector<GradBlock<Scalar>> out;
  for (const auto& l : g.layers) append_blocks(out, l);
  append_blocks(out, g.readout);
  return out;
}

/// Grows the readout to `new_class_count` rows. Existing rows are copied
/// untouched; new rows get uniform +-1/sqrt(fan_in) init.
template <typename Scalar>
SnnModel<Scalar> expand_readout(const SnnModel<Scalar>& model, Eigen::Index new_class_count, std::uint64_t seed) {
  const Eigen::Index old = model.num_classes();
  if (new_class_count <= old)
    throw ArgumentError("expand_readout: new class count " + std::to_string(new_class_count) +
                        " must exceed current " + std::to_string(old));
  Rng rng(seed);
  const auto fresh = DenseLayer<Scalar>::uniform(model.readout.in_dim(), new_class_count - old, rng);
  SnnModel<Scalar> out = model;
  out.readout.weights.resize(new_class_count, model.readout.in_dim());
  out.readout.bias.resize(new_class_count);
  out.readout.weights.topRows(old) = model.readout.weights;
  out.readout.bias.head(old) = model.readout.bias;
  out.readout.weights.bottomRows(new_class_count - old) = fresh.weights;
  out.readout.bias.tail(new_class_count - old) = fresh.bias;
  return out;
}

}  // namespace ecc
