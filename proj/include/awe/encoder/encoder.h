// include/awe/encoder/encoder.h

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

#ifndef AWE_ENCODER_ENCODER_H_
#define AWE_ENCODER_ENCODER_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "awe/base/common.h"

namespace awe {

enum class CellType { kGru, kVanillaTanh };

std::string CellTypeName(CellType cell);
CellType ParseCellType(const std::string &name);

struct EncoderConfig {
  int input_dim = 13;
  int hidden_dim = 400;
  int n_layers = 3;
  int embed_dim = 130;
  CellType cell = CellType::kGru;
  int max_frames = 120;

  void Validate() const;
  /// Rows of the stacked gate pre-activations: 3H for a GRU, H otherwise.
  int GateRows() const { return cell == CellType::kGru ? 3 * hidden_dim : hidden_dim; }
  friend bool operator==(const EncoderConfig &, const EncoderConfig &) = default;
};

/// Weights of one unidirectional recurrent layer. For a GRU the gate rows are
/// stacked as [reset; update; candidate], following the usual convention
///   r = sig(W_ir x + b_ir + W_hr h + b_hr)
///   z = sig(W_iz x + b_iz + W_hz h + b_hz)
///   n = tanh(W_in x + b_in + r * (W_hn h + b_hn))
///   h' = (1 - z) * n + z * h
/// A vanilla cell computes h' = tanh(W_ih x + b_ih + W_hh h + b_hh).
template <typename Real>
struct RecurrentLayer {
  using Mat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
  Mat w_ih, w_hh;
  Vec b_ih, b_hh;
};

/// All encoder weights: the recurrent stack plus the output projection
/// z = W_out h_T + b_out. The same type holds parameter gradients.
template <typename Real>
struct EncoderParamsT {
  using Mat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

  std::vector<RecurrentLayer<Real>> layers;
  Mat w_out;
  Vec b_out;

  static EncoderParamsT Zeros(const EncoderConfig &cfg);

  /// Calls f(name, tensor) for every tensor in a fixed order; tensor is a
  /// Mat& or Vec& (const when Self is const).
  template <typename Self, typename F>
  static void Visit(Self &self, F &&f) {
    for (std::size_t l = 0; l < self.layers.size(); ++l) {
      const std::string p = "layer" + std::to_string(l) + ".";
      f(p + "w_ih", self.layers[l].w_ih);
      f(p + "w_hh", self.layers[l].w_hh);
      f(p + "b_ih", self.layers[l].b_ih);
      f(p + "b_hh", self.layers[l].b_hh);
    }
    f(std::string("w_out"), self.w_out);
    f(std::string("b_out"), self.b_out);
  }
  template <typename F> void ForEachTensor(F &&f) { Visit(*this, f); }
  template <typename F> void ForEachTensor(F &&f) const { Visit(*this, f); }

  template <typename To>
  EncoderParamsT<To> Cast() const;

  void SetZero();
  std::size_t NumParams() const;
  /// Throws unless every tensor matches the shapes implied by cfg.
  void CheckShapes(const EncoderConfig &cfg) const;
  bool AllFinite() const;
};

using EncoderParams = EncoderParamsT<float>;
using ParamGradients = EncoderParamsT<float>;
using Embedding = Eigen::VectorXf;

template <typename Real>
using SequenceT = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Uniform in [-1/sqrt(hidden_dim), 1/sqrt(hidden_dim)], deterministic per seed.
EncoderParams InitParams(const EncoderConfig &cfg, std::uint64_t seed);

/// One forward/backward pass over a batch of variable-length sequences.
///
/// Sequences are packed start-aligned and sorted by decreasing length, so the
/// sequences still running at step t always form a contiguous prefix of the
/// batch and every step is a dense matrix product. Sequences longer than
/// cfg.max_frames are cut to their first max_frames frames.
template <typename Real>
class EncoderPass {
 public:
  using Mat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

  EncoderPass(const EncoderParamsT<Real> &params, const EncoderConfig &cfg);

  /// Returns the M x B embedding matrix (one column per input, input order).
  /// With keep_cache, activations are retained for Backward().
  Mat Forward(std::span<const SequenceT<Real> *const> batch, bool keep_cache = true);

  /// Accumulates d(loss)/d(params) into *grads given d(loss)/d(embeddings)
  /// (M x B) for the batch of the last Forward().
  void Backward(const Mat &d_embeddings, EncoderParamsT<Real> *grads) const;

  /// Embeddings of every prefix of each sequence whose length is in
  /// `lengths` (ascending). Result[b][i] is the embedding of the first
  /// lengths[i] frames of batch[b]; empty when lengths[i] > T_b.
  /// Prefixes longer than max_frames use the truncated state.
  std::vector<std::vector<Eigen::Matrix<Real, Eigen::Dynamic, 1>>> ForwardPrefixes(
      std::span<const SequenceT<Real> *const> batch, std::span<const int> lengths);

 private:
  void Pack(std::span<const SequenceT<Real> *const> batch);
  void RunLayers(bool keep_cache);

  const EncoderParamsT<Real> &params_;
  EncoderConfig cfg_;

  // Packing of the current batch.
  std::vector<int> order_;    // packed slot -> batch index
  std::vector<int> lengths_;  // per packed slot, after truncation
  std::vector<int> active_;   // per step: number of running sequences
  std::vector<int> offset_;   // per step: first packed column
  int total_columns_ = 0;

  Mat input_;                   // input_dim x N
  std::vector<Mat> outputs_;    // per layer: H x N hidden states
  std::vector<Mat> gates_;      // per layer: G x N post-activation gates
  std::vector<Mat> hidden_n_;   // per layer (GRU): H x N, W_hn h + b_hn
  Mat final_hidden_;            // H x B, input order
};

extern template class EncoderPass<float>;
extern template class EncoderPass<double>;

/// Embedding of one sequence.
Embedding Encode(const EncoderParams &params, const EncoderConfig &cfg,
                 const FeatureMatrix &x);
/// Element-wise identical in contract to Encode; input order is preserved.
std::vector<Embedding> EncodeBatch(const EncoderParams &params, const EncoderConfig &cfg,
                                   std::span<const FeatureMatrix> batch);

/// Exact gradients of sum_b upstream[:, b] . z_b with respect to every
/// parameter, accumulated over the batch. upstream is M x B.
template <typename Real>
EncoderParamsT<Real> Backward(const EncoderParamsT<Real> &params, const EncoderConfig &cfg,
                              std::span<const SequenceT<Real>> batch,
                              const Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic> &upstream);

}  // namespace awe

#endif  // AWE_ENCODER_ENCODER_H_
