// include/awe/train/adam.h

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

#ifndef AWE_TRAIN_ADAM_H_
#define AWE_TRAIN_ADAM_H_

#include <cstdint>

#include "awe/encoder/encoder.h"

namespace awe {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  EncoderParams m;  // first moments
  EncoderParams v;  // second moments
  std::int64_t step = 0;

  static AdamState ZerosLike(const EncoderConfig &cfg) {
    return {EncoderParams::Zeros(cfg), EncoderParams::Zeros(cfg), 0};
  }
};

/// One bias-corrected Adam update of *params in place:
///   m <- b1 m + (1 - b1) g,  v <- b2 v + (1 - b2) g^2
///   p <- p - lr * m_hat / (sqrt(v_hat) + eps)
/// with m_hat = m / (1 - b1^t), v_hat = v / (1 - b2^t). Throws, naming the
/// tensor, if a gradient is not finite; nothing is modified in that case.
void AdamStep(EncoderParams *params, const ParamGradients &grads, AdamState *state,
              const AdamConfig &cfg);

}  // namespace awe

#endif  // AWE_TRAIN_ADAM_H_
