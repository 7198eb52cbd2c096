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

// Training objectives. The joint loss is cross-entropy plus logit distillation
// plus an optional spike-to-ANN feature alignment term. The incremental loss
// adds self-distillation from a pre-update snapshot to the new-task term.
// Every loss returns its value together with dLoss/dlogits.

#include <optional>

#include "ecc/nn.hpp"

namespace ecc {

struct LossWeights {
  double lambda1 = 1.0;  // logit distillation
  double lambda2 = 0.5;  // feature alignment
  double lambda3 = 1.0;  // old-knowledge retention
  double temperature = 2.0;

  void validate() const {
    for (double v : {lambda1, lambda2, lambda3})
      if (!std::isfinite(v) || v < 0) throw ArgumentError("LossWeights: lambdas must be finite and >= 0");
    if (!std::isfinite(temperature) || !(temperature > 0))
      throw ArgumentError("LossWeights: temperature must be positive");
  }
};

template <typename Scalar>
struct LossTerm {
  Scalar value = Scalar(0);
  MatX<Scalar> d_logits;
};

/// KL(softmax(teacher/T) || softmax(student/T)) * T^2, averaged over rows.
template <typename Scalar>
LossTerm<Scalar> logit_distill(const MatX<Scalar>& student, const MatX<Scalar>& teacher, Scalar temperature) {
  if (student.rows() != teacher.rows() || student.cols() != teacher.cols())
    throw ArgumentError("logit_distill: student is " + std::to_string(student.rows()) + "x" +
                        std::to_string(student.cols()) + ", teacher is " + std::to_string(teacher.rows()) + "x" +
                        std::to_string(teacher.cols()));
  if (!(temperature > Scalar(0))) throw ArgumentError("logit_distill: temperature must be positive");
  if (student.rows() == 0) throw ArgumentError("logit_distill: empty batch");
  const Scalar n = static_cast<Scalar>(student.rows());
  const MatX<Scalar> log_pt = log_softmax_rows(MatX<Scalar>(teacher / temperature));
  const MatX<Scalar> log_ps = log_softmax_rows(MatX<Scalar>(student / temperature));
  const MatX<Scalar> pt = scalar_exp(log_pt.array()).matrix();
  const MatX<Scalar> ps = scalar_exp(log_ps.array()).matrix();
  LossTerm<Scalar> out;
  const Scalar kl = (pt.array() * (log_pt - log_ps).array()).sum() / n;
  out.value = std::max(Scalar(0), kl * temperature * temperature);
  out.d_logits = (ps - pt) * (temperature / n);
  return out;
}

// ---------------------------------------------------------------------------
// Feature alignment

/// Training-only scaffolding: Linear -> batch standardization with learnable
/// scale/shift, mapping summed tap spikes into the ANN tap-feature space.
template <typename Scalar>
struct AlignmentHead {
  DenseLayer<Scalar> projection;  // spike dim -> ANN feature dim
  VecX<Scalar> gamma;
  VecX<Scalar> beta;
  VecX<Scalar> running_mean;
  VecX<Scalar> running_var;
  Scalar momentum = Scalar(0.1);
  Scalar epsilon = Scalar(1e-5);

  Eigen::Index in_dim() const { return projection.in_dim(); }
  Eigen::Index out_dim() const { return projection.out_dim(); }

  static AlignmentHead make(Eigen::Index spike_dim, Eigen::Index feature_dim, std::uint64_t seed) {
    Rng rng(seed);
    AlignmentHead h;
    h.projection = DenseLayer<Scalar>::uniform(spike_dim, feature_dim, rng);
    h.gamma = VecX<Scalar>::Ones(feature_dim);
    h.beta = VecX<Scalar>::Zero(feature_dim);
    h.running_mean = VecX<Scalar>::Zero(feature_dim);
    h.running_var = VecX<Scalar>::Ones(feature_dim);
    return h;
  }

  void update_running_stats(const VecX<Scalar>& batch_mean, const VecX<Scalar>& batch_var, Eigen::Index n) {
    const Scalar unbias = n > 1 ? static_cast<Scalar>(n) / static_cast<Scalar>(n - 1) : Scalar(1);
    running_mean = (Scalar(1) - momentum) * running_mean + momentum * batch_mean;
    running_var = (Scalar(1) - momentum) * running_var + momentum * (batch_var * unbias);
  }
};

template <typename Scalar>
struct AlignmentGrad {
  DenseGrad<Scalar> projection;
  VecX<Scalar> d_gamma;
  VecX<Scalar> d_beta;
};

template <typename Scalar>
struct AlignmentResult {
  Scalar value = Scalar(0);
  MatX<Scalar> aligned;         // F'_s
  MatX<Scalar> d_summed_spikes;  // flows back into the spiking network
  AlignmentGrad<Scalar> head_grad;
  VecX<Scalar> batch_mean;
  VecX<Scalar> batch_var;
};

/// Mean over rows of ||F_a - BN(Linear(sum_t F_s^t))||_2. The ANN features
/// are a constant: no gradient is produced for them. `training` selects
/// batch statistics; otherwise the head's running statistics are used.
template <typename Scalar>
AlignmentResult<Scalar> align_features(const MatX<Scalar>& summed_spikes, const AlignmentHead<Scalar>& head,
                                       const MatX<Scalar>& ann_features, bool training = true) {
  if (summed_spikes.rows() != ann_features.rows())
    throw ArgumentError("align_features: spike and ANN batches differ in size");
  if (summed_spikes.cols() != head.in_dim())
    throw ArgumentError("align_features: spike width does not match head input");
  if (ann_features.cols() != head.out_dim())
    throw ArgumentError("align_features: head output does not match ANN feature width");
  const Eigen::Index n = summed_spikes.rows();
  if (n == 0) throw ArgumentError("align_features: empty batch");
  const Scalar nn = static_cast<Scalar>(n);

  AlignmentResult<Scalar> r;
  const MatX<Scalar> y = affine(summed_spikes, head.projection);
  VecX<Scalar> mean, var;
  if (training) {
    mean = y.colwise().mean().transpose();
    var = (y.rowwise() - mean.transpose()).array().square().colwise().mean().transpose();
  } else {
    mean = head.running_mean;
    var = head.running_var;
  }
  const VecX<Scalar> inv_std = (var.array() + head.epsilon).rsqrt().matrix();
  const MatX<Scalar> xhat = (y.rowwise() - mean.transpose()).array().rowwise() * inv_std.transpose().array();
  r.aligned = (xhat.array().rowwise() * head.gamma.transpose().array()).rowwise() + head.beta.transpose().array();
  r.batch_mean = mean;
  r.batch_var = var;

  const MatX<Scalar> diff = r.aligned - ann_features;
  const VecX<Scalar> dist = diff.rowwise().norm();
  r.value = dist.sum() / nn;

  MatX<Scalar> d_aligned = MatX<Scalar>::Zero(n, diff.cols());
  for (Eigen::Index i = 0; i < n; ++i)
    if (dist(i) > Scalar(0)) d_aligned.row(i) = diff.row(i) / (dist(i) * nn);

  r.head_grad.d_gamma = (d_aligned.array() * xhat.array()).colwise().sum().transpose();
  r.head_grad.d_beta = d_aligned.colwise().sum().transpose();
  const MatX<Scalar> d_xhat = d_aligned.array().rowwise() * head.gamma.transpose().array();
  MatX<Scalar> d_y;
  if (training) {
    const RowVecX<Scalar> sum_dx = d_xhat.colwise().sum();
    const RowVecX<Scalar> sum_dx_xhat = (d_xhat.array() * xhat.array()).colwise().sum();
    d_y = ((nn * d_xhat).rowwise() - sum_dx).array() - xhat.array().rowwise() * sum_dx_xhat.array();
    d_y = (d_y.array().rowwise() * (inv_std.transpose().array() / nn)).matrix();
  } else {
    d_y = d_xhat.array().rowwise() * inv_std.transpose().array();
  }
  r.head_grad.projection = DenseGrad<Scalar>::zeros_like(head.projection);
  accumulate_affine_grad(r.head_grad.projection, summed_spikes, d_y);
  r.d_summed_spikes = d_y * head.projection.weights;
  return r;
}

template <typename Scalar>
std::vector<ParamBlock<Scalar>> parameter_blocks(AlignmentHead<Scalar>& h) {
  std::vector<ParamBlock<Scalar>> out;
  append_blocks(out, h.projection);
  out.push_back({h.gamma.data(), h.gamma.size()});
  out.push_back({h.beta.data(), h.beta.size()});
  return out;
}

template <typename Scalar>
std::vector<GradBlock<Scalar>> gradient_blocks(const AlignmentGrad<Scalar>& g) {
  std::vector<GradBlock<Scalar>> out;
  append_blocks(out, g.projection);
  out.push_back({g.d_gamma.data(), g.d_gamma.size()});
  out.push_back({g.d_beta.data(), g.d_beta.size()});
  return out;
}

// ---------------------------------------------------------------------------
// Composite objectives

template <typename Scalar>
struct AlignmentInputs {
  const MatX<Scalar>& summed_spikes;
  const AlignmentHead<Scalar>& head;
  const MatX<Scalar>& ann_features;
  bool training = true;
};

template <typename Scalar>
struct JointLoss {
  Scalar value = Scalar(0);
  Scalar ce = Scalar(0);
  Scalar logit = Scalar(0);
  Scalar align = Scalar(0);
  MatX<Scalar> d_logits;
  std::optional<AlignmentResult<Scalar>> alignment;  // gradients pre-scaled by lambda2
};

/// ce + lambda1 * logit_distill (+ lambda2 * align when alignment inputs are
/// given). Terms with a zero weight are skipped entirely.
template <typename Scalar>
JointLoss<Scalar> joint_loss(const MatX<Scalar>& student_logits, std::span<const int> labels,
                             const MatX<Scalar>& teacher_logits, const std::optional<AlignmentInputs<Scalar>>& align,
                             const LossWeights& w) {
  w.validate();
  if (w.lambda2 > 0 && !align) throw ArgumentError("joint_loss: lambda2 > 0 requires alignment inputs");
  if (w.lambda2 == 0 && align) throw ArgumentError("joint_loss: alignment inputs given with lambda2 == 0");

  JointLoss<Scalar> out;
  const MatX<Scalar> probs = softmax_rows(student_logits);
  out.ce = cross_entropy(probs, labels);
  out.value = out.ce;
  out.d_logits = cross_entropy_logit_grad(probs, labels);
  if (w.lambda1 > 0) {
    auto kd = logit_distill(student_logits, teacher_logits, Scalar(w.temperature));
    out.logit = kd.value;
    out.value += Scalar(w.lambda1) * kd.value;
    out.d_logits += Scalar(w.lambda1) * kd.d_logits;
  }
  if (w.lambda2 > 0) {
    auto a = align_features(align->summed_spikes, align->head, align->ann_features, align->training);
    const Scalar l2(w.lambda2);
    out.align = a.value;
    out.value += l2 * a.value;
    a.d_summed_spikes *= l2;
    a.head_grad.projection.d_weights *= l2;
    a.head_grad.projection.d_bias *= l2;
    a.head_grad.d_gamma *= l2;
    a.head_grad.d_beta *= l2;
    out.alignment = std::move(a);
  }
  return out;
}

template <typename Scalar>
struct LwfLoss {
  Scalar value = Scalar(0);
  Scalar l_new = Scalar(0);
  Scalar l_old = Scalar(0);
  MatX<Scalar> d_logits;
};

/// L_new + lambda3 * L_old, where
///   L_new = CE(softmax(new), y_hat) + lambda1 * logit_distill(new, cloud)
///   L_old = logit_distill(new[:, :K_old], old)
/// `old_logits` has one column per class the snapshot knew; those classes
/// occupy the leading readout columns of the new model.
template <typename Scalar>
LwfLoss<Scalar> lwf_loss(const MatX<Scalar>& new_logits, std::span<const int> labels, const MatX<Scalar>& cloud_logits,
                         const MatX<Scalar>& old_logits, const LossWeights& w) {
  w.validate();
  if (new_logits.rows() == 0) throw ArgumentError("lwf_loss: empty buffer batch");
  if (cloud_logits.cols() != new_logits.cols())
    throw ArgumentError("lwf_loss: cloud logits must match the current class count");
  if (old_logits.rows() != new_logits.rows() || old_logits.cols() > new_logits.cols())
    throw ArgumentError("lwf_loss: old-model logits do not fit the new head");

  LwfLoss<Scalar> out;
  const MatX<Scalar> probs = softmax_rows(new_logits);
  out.l_new = cross_entropy(probs, labels);
  out.d_logits = cross_entropy_logit_grad(probs, labels);
  if (w.lambda1 > 0) {
    auto kd = logit_distill(new_logits, cloud_logits, Scalar(w.temperature));
    out.l_new += Scalar(w.lambda1) * kd.value;
    out.d_logits += Scalar(w.lambda1) * kd.d_logits;
  }
  out.value = out.l_new;
  if (w.lambda3 > 0 && old_logits.cols() > 0) {
    const Eigen::Index k_old = old_logits.cols();
    auto old_term = logit_distill(MatX<Scalar>(new_logits.leftCols(k_old)), old_logits, Scalar(w.temperature));
    out.l_old = old_term.value;
    out.value += Scalar(w.lambda3) * old_term.value;
    out.d_logits.leftCols(k_old) += Scalar(w.lambda3) * old_term.d_logits;
  }
  return out;
}

}  // namespace ecc
