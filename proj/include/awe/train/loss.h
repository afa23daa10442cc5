// include/awe/train/loss.h

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

#ifndef AWE_TRAIN_LOSS_H_
#define AWE_TRAIN_LOSS_H_

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "awe/base/common.h"

namespace awe {

/// u.v / (|u| |v|), clamped to [-1, 1]. Throws on a zero vector.
template <typename Real>
Real CosineSimilarity(const Eigen::Matrix<Real, Eigen::Dynamic, 1> &u,
                      const Eigen::Matrix<Real, Eigen::Dynamic, 1> &v);

template <typename Real>
struct ContrastiveLossResult {
  using Vec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
  Real loss = 0;
  Vec grad_anchor;
  Vec grad_positive;
  std::vector<Vec> grad_negatives;
};

/// Softmax contrastive loss of one anchor against its positive and K
/// negatives, with cosine similarities scaled by 1/tau:
///
///   J = -log( exp(s_p / tau) / sum_{j in {p, n_1..n_K}} exp(s_j / tau) )
///
/// where s_j = cos(z_a, z_j). Returns J and its exact gradient with respect
/// to every input vector. The log-sum-exp subtracts the max logit.
template <typename Real>
ContrastiveLossResult<Real> ContrastiveLoss(
    const Eigen::Matrix<Real, Eigen::Dynamic, 1> &anchor,
    const Eigen::Matrix<Real, Eigen::Dynamic, 1> &positive,
    std::span<const Eigen::Matrix<Real, Eigen::Dynamic, 1>> negatives, Real tau);

}  // namespace awe

#endif  // AWE_TRAIN_LOSS_H_
