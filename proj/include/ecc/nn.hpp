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

// Dense network engine: layers, the cloud MLP, softmax/cross-entropy and the
// first-order optimizers shared by ANN and SNN training. Batches are row-major
// in the logical sense: one sample per matrix row.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "ecc/types.hpp"

namespace ecc {

enum class Activation : std::uint8_t { Identity, Relu };

inline const char* to_string(Activation a) { return a == Activation::Relu ? "relu" : "identity"; }

template <typename Scalar>
struct DenseLayer {
  MatX<Scalar> weights;  // out_dim x in_dim
  VecX<Scalar> bias;     // out_dim
  Activation activation = Activation::Identity;

  Eigen::Index in_dim() const { return weights.cols(); }
  Eigen::Index out_dim() const { return weights.rows(); }
  Eigen::Index macs() const { return weights.size(); }

  bool all_finite() const { return weights.allFinite() && bias.allFinite(); }

  static DenseLayer zeros(Eigen::Index in, Eigen::Index out, Activation act = Activation::Identity) {
    return {MatX<Scalar>::Zero(out, in), VecX<Scalar>::Zero(out), act};
  }

  /// Uniform init in +-1/sqrt(fan_in) for weights and bias.
  static DenseLayer uniform(Eigen::Index in, Eigen::Index out, Rng& rng,
                            Activation act = Activation::Identity, double gain = 1.0) {
    DenseLayer layer = zeros(in, out, act);
    const double bound = gain / std::sqrt(static_cast<double>(in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (Eigen::Index r = 0; r < out; ++r)
      for (Eigen::Index c = 0; c < in; ++c) layer.weights(r, c) = static_cast<Scalar>(dist(rng));
    for (Eigen::Index r = 0; r < out; ++r) layer.bias(r) = static_cast<Scalar>(dist(rng));
    return layer;
  }
};

template <typename Scalar>
struct DenseGrad {
  MatX<Scalar> d_weights;
  VecX<Scalar> d_bias;

  static DenseGrad zeros_like(const DenseLayer<Scalar>& layer) {
    return {MatX<Scalar>::Zero(layer.out_dim(), layer.in_dim()), VecX<Scalar>::Zero(layer.out_dim())};
  }
};

/// X * W^T + 1 * b^T. The coefficient-based product makes every output row a
/// function of its input row alone, so a sample scores identically whether it
/// is evaluated alone or inside a batch.
template <typename Scalar, typename Derived>
MatX<Scalar> affine(const Eigen::MatrixBase<Derived>& x, const DenseLayer<Scalar>& layer) {
  if (x.cols() != layer.in_dim())
    throw ArgumentError("affine: input has " + std::to_string(x.cols()) + " columns, layer expects " +
                        std::to_string(layer.in_dim()));
  MatX<Scalar> z = x.lazyProduct(layer.weights.transpose());
  z.rowwise() += layer.bias.transpose();
  return z;
}

template <typename Scalar>
MatX<Scalar> activate(MatX<Scalar> z, Activation act) {
  if (act == Activation::Relu) z = z.cwiseMax(Scalar(0));
  return z;
}

/// Accumulates parameter gradients of an affine map given the upstream
/// gradient of its output.
template <typename Scalar, typename DX, typename DG>
void accumulate_affine_grad(DenseGrad<Scalar>& grad, const Eigen::MatrixBase<DX>& input,
                            const Eigen::MatrixBase<DG>& upstream) {
  grad.d_weights.noalias() += upstream.transpose() * input;
  grad.d_bias += upstream.colwise().sum().transpose();
}

// ---------------------------------------------------------------------------
// softmax / cross-entropy

/// Elementwise std::exp. Eigen's vectorized exp floors deep negatives at a
/// denormal instead of 0, which breaks exact one-hot probabilities.
template <typename Derived>
auto scalar_exp(const Eigen::ArrayBase<Derived>& a) {
  using S = typename Derived::Scalar;
  return a.unaryExpr([](S v) { using std::exp; return exp(v); });
}

template <typename Scalar>
VecX<Scalar> softmax(const VecX<Scalar>& logits) {
  if (logits.size() < 1) throw ArgumentError("softmax: empty logits");
  if (!logits.allFinite()) throw NumericError("softmax: non-finite logits");
  VecX<Scalar> e = scalar_exp(logits.array() - logits.maxCoeff()).matrix();
  return e / e.sum();
}

template <typename Scalar>
MatX<Scalar> softmax_rows(const MatX<Scalar>& logits) {
  if (!logits.allFinite()) throw NumericError("softmax: non-finite logits");
  MatX<Scalar> p = logits.colwise() - logits.rowwise().maxCoeff();
  p = scalar_exp(p.array()).matrix();
  p.array().colwise() /= p.rowwise().sum().array();
  return p;
}

template <typename Scalar>
MatX<Scalar> log_softmax_rows(const MatX<Scalar>& logits) {
  if (!logits.allFinite()) throw NumericError("log_softmax: non-finite logits");
  MatX<Scalar> shifted = logits.colwise() - logits.rowwise().maxCoeff();
  VecX<Scalar> lse = scalar_exp(shifted.array()).rowwise().sum().log().matrix();
  return shifted.colwise() - lse;
}

inline constexpr double kProbFloor = 1e-12;

/// Mean over rows of -log p[label], with probabilities floored at 1e-12.
template <typename Scalar>
Scalar cross_entropy(const MatX<Scalar>& probs, std::span<const int> labels) {
  if (probs.rows() != static_cast<Eigen::Index>(labels.size()))
    throw ArgumentError("cross_entropy: batch size mismatch");
  if (probs.rows() == 0) throw ArgumentError("cross_entropy: empty batch");
  Scalar total(0);
  for (Eigen::Index n = 0; n < probs.rows(); ++n) {
    const int y = labels[static_cast<std::size_t>(n)];
    if (y < 0 || y >= probs.cols())
      throw ArgumentError("cross_entropy: label " + std::to_string(y) + " out of range");
    total -= std::log(std::max(probs(n, y), Scalar(kProbFloor)));
  }
  return total / static_cast<Scalar>(probs.rows());
}

/// d(cross_entropy(softmax(z)))/dz = (softmax(z) - onehot) / N.
template <typename Scalar>
MatX<Scalar> cross_entropy_logit_grad(const MatX<Scalar>& probs, std::span<const int> labels) {
  MatX<Scalar> g = probs;
  for (Eigen::Index n = 0; n < g.rows(); ++n) g(n, labels[static_cast<std::size_t>(n)]) -= Scalar(1);
  return g / static_cast<Scalar>(g.rows());
}

// ---------------------------------------------------------------------------
// MLP

template <typename Scalar>
struct MlpModel {
  std::vector<DenseLayer<Scalar>> layers;
  std::size_t feature_tap_index = 0;

  Eigen::Index input_dim() const { return layers.front().in_dim(); }
  Eigen::Index num_classes() const { return layers.back().out_dim(); }
  Eigen::Index tap_dim() const { return layers.at(feature_tap_index).out_dim(); }

  Eigen::Index total_macs() const {
    Eigen::Index m = 0;
    for (const auto& l : layers) m += l.macs();
    return m;
  }

  std::vector<Eigen::Index> arch() const {
    std::vector<Eigen::Index> sizes{input_dim()};
    for (const auto& l : layers) sizes.push_back(l.out_dim());
    return sizes;
  }
};

template <typename Scalar>
using MlpGradients = std::vector<DenseGrad<Scalar>>;

/// Builds an MLP with ReLU hidden layers and an identity output layer.
/// `arch` lists every width from input to classes.
template <typename Scalar>
MlpModel<Scalar> make_mlp(std::span<const Eigen::Index> arch, std::size_t tap_index, std::uint64_t seed) {
  if (arch.size() < 2) throw ArgumentError("make_mlp: need at least input and output widths");
  for (auto w : arch)
    if (w < 1) throw ArgumentError("make_mlp: layer widths must be positive");
  const std::size_t n_layers = arch.size() - 1;
  if (n_layers > 1 && tap_index >= n_layers - 1)
    throw ArgumentError("make_mlp: feature tap must index a hidden layer");
  Rng rng(seed);
  MlpModel<Scalar> m;
  m.feature_tap_index = tap_index;
  for (std::size_t i = 0; i < n_layers; ++i) {
    const auto act = (i + 1 == n_layers) ? Activation::Identity : Activation::Relu;
    m.layers.push_back(DenseLayer<Scalar>::uniform(arch[i], arch[i + 1], rng, act));
  }
  return m;
}

template <typename Scalar>
struct MlpForward {
  MatX<Scalar> logits;
  MatX<Scalar> tap_features;
  std::vector<MatX<Scalar>> activations;  // activations[0] is the input
};

template <typename Scalar, typename Derived>
MlpForward<Scalar> ann_forward(const MlpModel<Scalar>& model, const Eigen::MatrixBase<Derived>& batch) {
  if (model.layers.empty()) throw ArgumentError("ann_forward: empty model");
  if (batch.cols() != model.input_dim())
    throw ArgumentError("ann_forward: batch has " + std::to_string(batch.cols()) +
                        " features, model expects " + std::to_string(model.input_dim()));
  MlpForward<Scalar> out;
  out.activations.reserve(model.layers.size() + 1);
  out.activations.push_back(batch.template cast<Scalar>());
  for (const auto& layer : model.layers)
    out.activations.push_back(activate(affine(out.activations.back(), layer), layer.activation));
  out.logits = out.activations.back();
  out.tap_features = out.activations[model.feature_tap_index + 1];
  return out;
}

template <typename Scalar>
MlpGradients<Scalar> ann_backward(const MlpModel<Scalar>& model, const MlpForward<Scalar>& fwd,
                                  const MatX<Scalar>& d_logits) {
  MlpGradients<Scalar> grads;
  for (const auto& l : model.layers) grads.push_back(DenseGrad<Scalar>::zeros_like(l));
  MatX<Scalar> upstream = d_logits;
  for (std::size_t i = model.layers.size(); i-- > 0;) {
    const auto& layer = model.layers[i];
    if (layer.activation == Activation::Relu)
      upstream = (fwd.activations[i + 1].array() > Scalar(0)).select(upstream, Scalar(0));
    accumulate_affine_grad(grads[i], fwd.activations[i], upstream);
    if (i > 0) upstream = upstream * layer.weights;
  }
  return grads;
}

// ---------------------------------------------------------------------------
// Optimizers over flat parameter blocks.

template <typename Scalar>
struct ParamBlock {
  Scalar* data;
  Eigen::Index size;
};

template <typename Scalar>
struct GradBlock {
  const Scalar* data;
  Eigen::Index size;
};

template <typename Scalar>
void append_blocks(std::vector<ParamBlock<Scalar>>& out, DenseLayer<Scalar>& layer) {
  out.push_back({layer.weights.data(), layer.weights.size()});
  out.push_back({layer.bias.data(), layer.bias.size()});
}

template <typename Scalar>
void append_blocks(std::vector<GradBlock<Scalar>>& out, const DenseGrad<Scalar>& grad) {
  out.push_back({grad.d_weights.data(), grad.d_weights.size()});
  out.push_back({grad.d_bias.data(), grad.d_bias.size()});
}

template <typename Scalar>
std::vector<ParamBlock<Scalar>> parameter_blocks(MlpModel<Scalar>& m) {
  std::vector<ParamBlock<Scalar>> out;
  for (auto& l : m.layers) append_blocks(out, l);
  return out;
}

template <typename Scalar>
std::vector<GradBlock<Scalar>> gradient_blocks(const MlpGradients<Scalar>& g) {
  std::vector<GradBlock<Scalar>> out;
  for (const auto& l : g) append_blocks(out, l);
  return out;
}

enum class OptimizerKind : std::uint8_t { SgdMomentum, Adam };

struct OptimizerOptions {
  OptimizerKind kind = OptimizerKind::SgdMomentum;
  double learning_rate = 0.05;
  double momentum = 0.9;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// SGD with heavy-ball momentum or Adam. Accumulators are created lazily on
/// the first step and must keep the same block layout afterwards.
template <typename Scalar>
class Optimizer {
 public:
  explicit Optimizer(OptimizerOptions opts) : opts_(opts) {
    if (!(opts.learning_rate > 0)) throw ArgumentError("optimizer: learning rate must be positive");
  }

  void step(std::span<const ParamBlock<Scalar>> params, std::span<const GradBlock<Scalar>> grads) {
    if (params.size() != grads.size()) throw ArgumentError("optimizer: parameter/gradient count mismatch");
    if (first_.empty()) {
      for (const auto& p : params) {
        first_.push_back(VecX<Scalar>::Zero(p.size));
        second_.push_back(VecX<Scalar>::Zero(p.size));
      }
    }
    if (first_.size() != params.size()) throw StateError("optimizer: parameter layout changed");
    ++steps_;
    const Scalar lr(opts_.learning_rate);
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (params[i].size != grads[i].size || params[i].size != first_[i].size())
        throw StateError("optimizer: block shape changed");
      Eigen::Map<VecX<Scalar>> p(params[i].data, params[i].size);
      Eigen::Map<const VecX<Scalar>> g(grads[i].data, grads[i].size);
      if (opts_.kind == OptimizerKind::SgdMomentum) {
        first_[i] = Scalar(opts_.momentum) * first_[i] + g;
        p -= lr * first_[i];
      } else {
        const Scalar b1(opts_.beta1), b2(opts_.beta2);
        first_[i] = b1 * first_[i] + (Scalar(1) - b1) * g;
        second_[i] = b2 * second_[i] + (Scalar(1) - b2) * g.cwiseAbs2();
        const Scalar c1 = Scalar(1) - std::pow(b1, static_cast<Scalar>(steps_));
        const Scalar c2 = Scalar(1) - std::pow(b2, static_cast<Scalar>(steps_));
        p.array() -= lr * (first_[i].array() / c1) /
                     ((second_[i].array() / c2).sqrt() + Scalar(opts_.epsilon));
      }
    }
  }

  std::size_t steps() const { return steps_; }

 private:
  OptimizerOptions opts_;
  std::vector<VecX<Scalar>> first_;
  std::vector<VecX<Scalar>> second_;
  std::size_t steps_ = 0;
};

}  // namespace ecc
