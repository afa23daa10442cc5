// src/train/adam.cc

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

#include "awe/train/adam.h"

#include <cmath>
#include <vector>

namespace awe {

void AdamStep(EncoderParams *params, const ParamGradients &grads, AdamState *state,
              const AdamConfig &cfg) {
  grads.ForEachTensor([&](const std::string &name, const auto &t) {
    if (!t.allFinite()) throw Error("non-finite gradient in tensor " + name);
  });

  // Walk the five structures in lockstep; ForEachTensor has a fixed order.
  std::vector<float *> p_data, m_data, v_data;
  std::vector<const float *> g_data;
  std::vector<Eigen::Index> sizes, m_sizes, v_sizes, g_sizes;
  params->ForEachTensor([&](const std::string &, auto &x) { p_data.push_back(x.data()); sizes.push_back(x.size()); });
  state->m.ForEachTensor([&](const std::string &, auto &x) { m_data.push_back(x.data()); m_sizes.push_back(x.size()); });
  state->v.ForEachTensor([&](const std::string &, auto &x) { v_data.push_back(x.data()); v_sizes.push_back(x.size()); });
  grads.ForEachTensor([&](const std::string &, const auto &x) { g_data.push_back(x.data()); g_sizes.push_back(x.size()); });
  if (m_sizes != sizes || v_sizes != sizes || g_sizes != sizes)
    throw Error("Adam state or gradients do not match the parameter shapes");

  state->step += 1;
  const double t = static_cast<double>(state->step);
  const float c1 = static_cast<float>(1.0 / (1.0 - std::pow(cfg.beta1, t)));
  const float c2 = static_cast<float>(1.0 / (1.0 - std::pow(cfg.beta2, t)));
  const float b1 = static_cast<float>(cfg.beta1), b2 = static_cast<float>(cfg.beta2);
  const float lr = static_cast<float>(cfg.lr), eps = static_cast<float>(cfg.eps);

  for (std::size_t i = 0; i < sizes.size(); ++i) {
    Eigen::Map<Eigen::ArrayXf> p(p_data[i], sizes[i]), m(m_data[i], sizes[i]),
        v(v_data[i], sizes[i]);
    Eigen::Map<const Eigen::ArrayXf> g(g_data[i], sizes[i]);
    m = b1 * m + (1 - b1) * g;
    v = b2 * v + (1 - b2) * g.square();
    p -= lr * (m * c1) / ((v * c2).sqrt() + eps);
  }
}

}  // namespace awe
