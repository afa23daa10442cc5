// src/train/loss.cc

// Copyright 2026  awe contributors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "awe/train/loss.h"

#include <algorithm>
#include <cmath>

namespace awe {

template <typename Real>
Real CosineSimilarity(const Eigen::Matrix<Real, Eigen::Dynamic, 1> &u,
                      const Eigen::Matrix<Real, Eigen::Dynamic, 1> &v) {
  if (u.size() != v.size()) throw Error("cosine similarity of vectors with different lengths");
  Real nu = u.norm(), nv = v.norm();
  if (nu == 0 || nv == 0) throw Error("cosine similarity undefined for a zero vector");
  return std::clamp<Real>(u.dot(v) / (nu * nv), -1, 1);
}

template <typename Real>
ContrastiveLossResult<Real> ContrastiveLoss(
    const Eigen::Matrix<Real, Eigen::Dynamic, 1> &anchor,
    const Eigen::Matrix<Real, Eigen::Dynamic, 1> &positive,
    std::span<const Eigen::Matrix<Real, Eigen::Dynamic, 1>> negatives, Real tau) {
  using Vec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
  if (!(tau > 0)) throw Error("temperature must be positive");
  const std::size_t k = negatives.size();
  std::vector<const Vec *> others{&positive};
  for (const auto &n : negatives) others.push_back(&n);

  const Real na = anchor.norm();
  if (na == 0) throw Error("zero-norm anchor embedding: cosine undefined");
  std::vector<Real> norms(k + 1), sims(k + 1), logits(k + 1);
  for (std::size_t j = 0; j <= k; ++j) {
    if (others[j]->size() != anchor.size()) throw Error("embedding length mismatch in loss");
    norms[j] = others[j]->norm();
    if (norms[j] == 0) throw Error("zero-norm embedding: cosine undefined");
    sims[j] = anchor.dot(*others[j]) / (na * norms[j]);
    logits[j] = sims[j] / tau;
  }
  const Real max_logit = *std::max_element(logits.begin(), logits.end());
  Real sum = 0;
  for (Real l : logits) sum += std::exp(l - max_logit);
  const Real log_sum = max_logit + std::log(sum);

  ContrastiveLossResult<Real> out;
  out.loss = log_sum - logits[0];
  out.grad_anchor = Vec::Zero(anchor.size());
  out.grad_negatives.resize(k);
  for (std::size_t j = 0; j <= k; ++j) {
    // dJ/ds_j = (softmax_j - [j == positive]) / tau
    Real ds = (std::exp(logits[j] - log_sum) - (j == 0 ? 1 : 0)) / tau;
    const Vec &v = *others[j];
    out.grad_anchor += ds * (v / (na * norms[j]) - sims[j] * anchor / (na * na));
    Vec gv = ds * (anchor / (na * norms[j]) - sims[j] * v / (norms[j] * norms[j]));
    if (j == 0) out.grad_positive = std::move(gv);
    else out.grad_negatives[j - 1] = std::move(gv);
  }
  return out;
}

template float CosineSimilarity(const Eigen::VectorXf &, const Eigen::VectorXf &);
template double CosineSimilarity(const Eigen::VectorXd &, const Eigen::VectorXd &);
template ContrastiveLossResult<float> ContrastiveLoss(const Eigen::VectorXf &,
                                                     const Eigen::VectorXf &,
                                                     std::span<const Eigen::VectorXf>, float);
template ContrastiveLossResult<double> ContrastiveLoss(const Eigen::VectorXd &,
                                                       const Eigen::VectorXd &,
                                                       std::span<const Eigen::VectorXd>, double);

}  // namespace awe
