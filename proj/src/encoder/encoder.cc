// src/encoder/encoder.cc

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

#include "awe/encoder/encoder.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace awe {

std::string CellTypeName(CellType cell) {
  return cell == CellType::kGru ? "gru" : "vanilla-tanh";
}

CellType ParseCellType(const std::string &name) {
  if (name == "gru") return CellType::kGru;
  if (name == "vanilla-tanh" || name == "tanh" || name == "vanilla")
    return CellType::kVanillaTanh;
  throw Error("unknown cell type '" + name + "' (expected gru or vanilla-tanh)");
}

void EncoderConfig::Validate() const {
  if (input_dim < 1 || hidden_dim < 1 || n_layers < 1 || embed_dim < 1 || max_frames < 1)
    throw Error("encoder dimensions must all be >= 1");
}

template <typename Real>
EncoderParamsT<Real> EncoderParamsT<Real>::Zeros(const EncoderConfig &cfg) {
  cfg.Validate();
  EncoderParamsT p;
  const int g = cfg.GateRows(), h = cfg.hidden_dim;
  for (int l = 0; l < cfg.n_layers; ++l) {
    RecurrentLayer<Real> layer;
    layer.w_ih = Mat::Zero(g, l == 0 ? cfg.input_dim : h);
    layer.w_hh = Mat::Zero(g, h);
    layer.b_ih = Vec::Zero(g);
    layer.b_hh = Vec::Zero(g);
    p.layers.push_back(std::move(layer));
  }
  p.w_out = Mat::Zero(cfg.embed_dim, h);
  p.b_out = Vec::Zero(cfg.embed_dim);
  return p;
}

template <typename Real>
template <typename To>
EncoderParamsT<To> EncoderParamsT<Real>::Cast() const {
  EncoderParamsT<To> out;
  for (const auto &l : layers)
    out.layers.push_back({l.w_ih.template cast<To>(), l.w_hh.template cast<To>(),
                          l.b_ih.template cast<To>(), l.b_hh.template cast<To>()});
  out.w_out = w_out.template cast<To>();
  out.b_out = b_out.template cast<To>();
  return out;
}

template <typename Real>
void EncoderParamsT<Real>::SetZero() {
  ForEachTensor([](const std::string &, auto &t) { t.setZero(); });
}

template <typename Real>
std::size_t EncoderParamsT<Real>::NumParams() const {
  std::size_t n = 0;
  ForEachTensor([&](const std::string &, const auto &t) { n += t.size(); });
  return n;
}

template <typename Real>
void EncoderParamsT<Real>::CheckShapes(const EncoderConfig &cfg) const {
  EncoderParamsT expected = Zeros(cfg);
  if (expected.layers.size() != layers.size())
    throw Error("encoder parameters have " + std::to_string(layers.size()) +
                " layers, config expects " + std::to_string(expected.layers.size()));
  std::vector<std::pair<Eigen::Index, Eigen::Index>> want, got;
  expected.ForEachTensor([&](const std::string &, const auto &t) { want.emplace_back(t.rows(), t.cols()); });
  std::vector<std::string> names;
  ForEachTensor([&](const std::string &name, const auto &t) {
    got.emplace_back(t.rows(), t.cols());
    names.push_back(name);
  });
  for (std::size_t i = 0; i < want.size(); ++i)
    if (want[i] != got[i])
      throw Error("dimension mismatch for tensor " + names[i]);
}

template <typename Real>
bool EncoderParamsT<Real>::AllFinite() const {
  bool ok = true;
  ForEachTensor([&](const std::string &, const auto &t) { ok = ok && t.allFinite(); });
  return ok;
}

template struct EncoderParamsT<float>;
template struct EncoderParamsT<double>;
template EncoderParamsT<double> EncoderParamsT<float>::Cast<double>() const;
template EncoderParamsT<float> EncoderParamsT<double>::Cast<float>() const;
template EncoderParamsT<float> EncoderParamsT<float>::Cast<float>() const;
template EncoderParamsT<double> EncoderParamsT<double>::Cast<double>() const;

EncoderParams InitParams(const EncoderConfig &cfg, std::uint64_t seed) {
  EncoderParams p = EncoderParams::Zeros(cfg);
  const double bound = 1.0 / std::sqrt(static_cast<double>(cfg.hidden_dim));
  Rng rng(seed);
  p.ForEachTensor([&](const std::string &, auto &t) {
    for (Eigen::Index i = 0; i < t.size(); ++i)
      t.data()[i] = static_cast<float>(rng.Uniform(-bound, bound));
  });
  return p;
}

namespace {

template <typename Derived>
void SigmoidInPlace(Eigen::MatrixBase<Derived> &&x) {
  x = (1 + (-x.array()).exp()).inverse().matrix();
}

}  // namespace

template <typename Real>
EncoderPass<Real>::EncoderPass(const EncoderParamsT<Real> &params, const EncoderConfig &cfg)
    : params_(params), cfg_(cfg) {
  cfg_.Validate();
  params_.CheckShapes(cfg_);
}

template <typename Real>
void EncoderPass<Real>::Pack(std::span<const SequenceT<Real> *const> batch) {
  const int b = static_cast<int>(batch.size());
  std::vector<int> len(b);
  for (int i = 0; i < b; ++i) {
    const auto &x = *batch[i];
    if (x.cols() != cfg_.input_dim)
      throw Error("dimension mismatch: sequence has " + std::to_string(x.cols()) +
                  " features, encoder expects " + std::to_string(cfg_.input_dim));
    if (x.rows() < 1) throw Error("cannot encode an empty sequence");
    len[i] = std::min<int>(static_cast<int>(x.rows()), cfg_.max_frames);
  }
  order_.resize(b);
  std::iota(order_.begin(), order_.end(), 0);
  std::stable_sort(order_.begin(), order_.end(), [&](int a, int c) { return len[a] > len[c]; });
  lengths_.resize(b);
  for (int k = 0; k < b; ++k) lengths_[k] = len[order_[k]];

  const int t_max = b ? lengths_[0] : 0;
  active_.assign(t_max, 0);
  offset_.assign(t_max, 0);
  total_columns_ = 0;
  for (int t = 0; t < t_max; ++t) {
    int n = 0;
    while (n < b && lengths_[n] > t) ++n;
    active_[t] = n;
    offset_[t] = total_columns_;
    total_columns_ += n;
  }
  input_.resize(cfg_.input_dim, total_columns_);
  for (int t = 0; t < t_max; ++t)
    for (int k = 0; k < active_[t]; ++k)
      input_.col(offset_[t] + k) = batch[order_[k]]->row(t).transpose();
}

template <typename Real>
void EncoderPass<Real>::RunLayers(bool keep_cache) {
  const int h = cfg_.hidden_dim;
  const bool gru = cfg_.cell == CellType::kGru;
  const int t_max = static_cast<int>(active_.size());
  outputs_.assign(cfg_.n_layers, Mat());
  gates_.assign(cfg_.n_layers, Mat());
  hidden_n_.assign(cfg_.n_layers, Mat());

  for (int l = 0; l < cfg_.n_layers; ++l) {
    const auto &layer = params_.layers[l];
    const Mat &x = l == 0 ? input_ : outputs_[l - 1];
    // Input contributions for all steps at once; turned into gates in place.
    Mat gx = layer.w_ih * x;
    gx.colwise() += layer.b_ih;
    Mat &out = outputs_[l];
    out.resize(h, total_columns_);
    if (keep_cache && gru) hidden_n_[l].resize(h, total_columns_);

    Mat gh;
    for (int t = 0; t < t_max; ++t) {
      const int n = active_[t], off = offset_[t];
      if (t == 0) {
        gh = layer.b_hh.replicate(1, n);
      } else {
        gh.noalias() = layer.w_hh * out.middleCols(offset_[t - 1], n);
        gh.colwise() += layer.b_hh;
      }
      auto g = gx.middleCols(off, n);
      if (gru) {
        g.topRows(2 * h) += gh.topRows(2 * h);
        SigmoidInPlace(g.topRows(2 * h));
        auto r = g.topRows(h).array();
        auto z = g.middleRows(h, h).array();
        g.bottomRows(h) = (g.bottomRows(h).array() + r * gh.bottomRows(h).array()).tanh().matrix();
        auto cand = g.bottomRows(h).array();
        if (t == 0) {
          out.middleCols(off, n) = ((1 - z) * cand).matrix();
        } else {
          out.middleCols(off, n) =
              ((1 - z) * cand + z * out.middleCols(offset_[t - 1], n).array()).matrix();
        }
        if (keep_cache) hidden_n_[l].middleCols(off, n) = gh.bottomRows(h);
      } else {
        out.middleCols(off, n) = (g.array() + gh.array()).tanh().matrix();
      }
    }
    if (keep_cache && gru) gates_[l] = std::move(gx);
    if (!keep_cache && l > 0) outputs_[l - 1].resize(0, 0);
  }
}

template <typename Real>
typename EncoderPass<Real>::Mat EncoderPass<Real>::Forward(
    std::span<const SequenceT<Real> *const> batch, bool keep_cache) {
  Pack(batch);
  RunLayers(keep_cache);
  const int b = static_cast<int>(batch.size());
  const Mat &top = outputs_.back();
  final_hidden_.resize(cfg_.hidden_dim, b);
  for (int k = 0; k < b; ++k)
    final_hidden_.col(order_[k]) = top.col(offset_[lengths_[k] - 1] + k);
  Mat z = params_.w_out * final_hidden_;
  z.colwise() += params_.b_out;
  if (!keep_cache) {
    input_.resize(0, 0);
    outputs_.clear();
  }
  return z;
}

template <typename Real>
void EncoderPass<Real>::Backward(const Mat &d_embeddings, EncoderParamsT<Real> *grads) const {
  const int b = static_cast<int>(order_.size());
  if (d_embeddings.rows() != cfg_.embed_dim || d_embeddings.cols() != b)
    throw Error("upstream gradient shape mismatch: expected " +
                std::to_string(cfg_.embed_dim) + " x " + std::to_string(b));
  if (outputs_.size() != static_cast<std::size_t>(cfg_.n_layers) || outputs_.back().cols() != total_columns_)
    throw Error("EncoderPass::Backward needs a cached Forward()");

  const int h = cfg_.hidden_dim;
  const bool gru = cfg_.cell == CellType::kGru;
  const int t_max = static_cast<int>(active_.size());

  grads->w_out.noalias() += d_embeddings * final_hidden_.transpose();
  grads->b_out += d_embeddings.rowwise().sum();
  Mat d_final = params_.w_out.transpose() * d_embeddings;

  Mat d_out = Mat::Zero(h, total_columns_);
  for (int k = 0; k < b; ++k) d_out.col(offset_[lengths_[k] - 1] + k) = d_final.col(order_[k]);

  for (int l = cfg_.n_layers - 1; l >= 0; --l) {
    const auto &layer = params_.layers[l];
    auto &g = grads->layers[l];
    const Mat &out = outputs_[l];
    Mat d_gx(cfg_.GateRows(), total_columns_);
    Mat carry, dh, d_gh;

    for (int t = t_max - 1; t >= 0; --t) {
      const int n = active_[t], off = offset_[t];
      dh = d_out.middleCols(off, n);
      if (t + 1 < t_max) dh.leftCols(active_[t + 1]) += carry;
      auto dgx = d_gx.middleCols(off, n);

      if (gru) {
        auto r = gates_[l].middleCols(off, n).topRows(h).array();
        auto z = gates_[l].middleCols(off, n).middleRows(h, h).array();
        auto cand = gates_[l].middleCols(off, n).bottomRows(h).array();
        auto ghn = hidden_n_[l].middleCols(off, n).array();
        Mat h_prev = t > 0 ? Mat(out.middleCols(offset_[t - 1], n)) : Mat::Zero(h, n);

        auto d_cand_pre = (dh.array() * (1 - z) * (1 - cand.square())).eval();
        dgx.topRows(h) = (d_cand_pre * ghn * r * (1 - r)).matrix();
        dgx.middleRows(h, h) = (dh.array() * (h_prev.array() - cand) * z * (1 - z)).matrix();
        dgx.bottomRows(h) = d_cand_pre.matrix();
        d_gh.resize(3 * h, n);
        d_gh.topRows(2 * h) = dgx.topRows(2 * h);
        d_gh.bottomRows(h) = (d_cand_pre * r).matrix();
        carry = (dh.array() * z).matrix();
        if (t > 0) g.w_hh.noalias() += d_gh * h_prev.transpose();
      } else {
        dgx = (dh.array() * (1 - out.middleCols(off, n).array().square())).matrix();
        d_gh = dgx;
        carry = Mat::Zero(h, n);
        if (t > 0) g.w_hh.noalias() += d_gh * out.middleCols(offset_[t - 1], n).transpose();
      }
      g.b_hh += d_gh.rowwise().sum();
      if (t > 0) carry.noalias() += layer.w_hh.transpose() * d_gh;
    }

    const Mat &x = l == 0 ? input_ : outputs_[l - 1];
    g.w_ih.noalias() += d_gx * x.transpose();
    g.b_ih += d_gx.rowwise().sum();
    if (l > 0) d_out.noalias() = layer.w_ih.transpose() * d_gx;
  }
}

template <typename Real>
std::vector<std::vector<Eigen::Matrix<Real, Eigen::Dynamic, 1>>>
EncoderPass<Real>::ForwardPrefixes(std::span<const SequenceT<Real> *const> batch,
                                   std::span<const int> lengths) {
  Pack(batch);
  RunLayers(false);
  const int b = static_cast<int>(batch.size());
  const Mat &top = outputs_.back();

  std::vector<std::pair<int, int>> where;  // (batch index, length index)
  std::vector<int> columns;
  for (int k = 0; k < b; ++k) {
    const int full = static_cast<int>(batch[order_[k]]->rows());
    for (std::size_t i = 0; i < lengths.size(); ++i) {
      if (lengths[i] < 1 || lengths[i] > full) continue;
      const int step = std::min(lengths[i], lengths_[k]) - 1;
      where.emplace_back(order_[k], static_cast<int>(i));
      columns.push_back(offset_[step] + k);
    }
  }
  Mat states(cfg_.hidden_dim, static_cast<Eigen::Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) states.col(c) = top.col(columns[c]);
  Mat z = params_.w_out * states;
  z.colwise() += params_.b_out;

  std::vector<std::vector<Eigen::Matrix<Real, Eigen::Dynamic, 1>>> result(b);
  for (int k = 0; k < b; ++k) result[k].resize(lengths.size());
  for (std::size_t c = 0; c < where.size(); ++c)
    result[where[c].first][where[c].second] = z.col(c);
  input_.resize(0, 0);
  outputs_.clear();
  return result;
}

template class EncoderPass<float>;
template class EncoderPass<double>;

Embedding Encode(const EncoderParams &params, const EncoderConfig &cfg, const FeatureMatrix &x) {
  const FeatureMatrix *ptr = &x;
  EncoderPass<float> pass(params, cfg);
  return pass.Forward(std::span<const FeatureMatrix *const>(&ptr, 1), false).col(0);
}

std::vector<Embedding> EncodeBatch(const EncoderParams &params, const EncoderConfig &cfg,
                                   std::span<const FeatureMatrix> batch) {
  std::vector<const FeatureMatrix *> ptrs;
  for (const auto &x : batch) ptrs.push_back(&x);
  EncoderPass<float> pass(params, cfg);
  Eigen::MatrixXf z = pass.Forward(ptrs, false);
  std::vector<Embedding> out(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) out[i] = z.col(i);
  return out;
}

template <typename Real>
EncoderParamsT<Real> Backward(const EncoderParamsT<Real> &params, const EncoderConfig &cfg,
                              std::span<const SequenceT<Real>> batch,
                              const Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic> &upstream) {
  std::vector<const SequenceT<Real> *> ptrs;
  for (const auto &x : batch) ptrs.push_back(&x);
  EncoderPass<Real> pass(params, cfg);
  pass.Forward(ptrs, true);
  EncoderParamsT<Real> grads = EncoderParamsT<Real>::Zeros(cfg);
  pass.Backward(upstream, &grads);
  return grads;
}

template EncoderParamsT<float> Backward(const EncoderParamsT<float> &, const EncoderConfig &,
                                        std::span<const SequenceT<float>>,
                                        const Eigen::MatrixXf &);
template EncoderParamsT<double> Backward(const EncoderParamsT<double> &, const EncoderConfig &,
                                         std::span<const SequenceT<double>>,
                                         const Eigen::MatrixXd &);

}  // namespace awe
