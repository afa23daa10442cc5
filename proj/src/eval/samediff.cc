// src/eval/samediff.cc

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

#include "awe/eval/samediff.h"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <unordered_map>

#include <spdlog/fmt/fmt.h>

#include "awe/base/parallel.h"

namespace awe {

namespace {

constexpr Eigen::Index kTile = 1024;
constexpr std::size_t kEncodeChunk = 128;

using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::vector<double> DistancesOfUnitRows(const RowMatrixXd &x, int num_threads) {
  const Eigen::Index n = x.rows();
  std::vector<double> out(static_cast<std::size_t>(n * (n - 1) / 2));
  const Eigen::Index tiles = (n + kTile - 1) / kTile;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> work;
  for (Eigen::Index a = 0; a < tiles; ++a)
    for (Eigen::Index b = a; b < tiles; ++b) work.emplace_back(a, b);

  ParallelFor(work.size(), [&](std::size_t w) {
    const Eigen::Index r0 = work[w].first * kTile, c0 = work[w].second * kTile;
    const Eigen::Index nr = std::min(kTile, n - r0), nc = std::min(kTile, n - c0);
    Eigen::MatrixXd g = x.middleRows(r0, nr) * x.middleRows(c0, nc).transpose();
    for (Eigen::Index i = 0; i < nr; ++i) {
      const Eigen::Index row = r0 + i;
      const Eigen::Index first = std::max(c0, row + 1);
      if (first >= c0 + nc) continue;
      double *dst = out.data() + PairIndex(n, row, first);
      for (Eigen::Index col = first; col < c0 + nc; ++col) *dst++ = 1.0 - g(i, col - c0);
    }
  }, num_threads);
  return out;
}

template <typename Get>
RowMatrixXd UnitRows(std::size_t n, Get get) {
  if (n == 0) return {};
  const Eigen::Index m = get(0).size();
  RowMatrixXd x(static_cast<Eigen::Index>(n), m);
  for (std::size_t i = 0; i < n; ++i) {
    const Embedding &z = get(i);
    if (z.size() != m) throw Error(fmt::format("embedding {} has dimension {}, expected {}", i, z.size(), m));
    Eigen::VectorXd v = z.cast<double>();
    const double norm = v.norm();
    if (!(norm > 0.0)) throw Error(fmt::format("zero-norm embedding at index {}", i));
    x.row(static_cast<Eigen::Index>(i)) = v.transpose() / norm;
  }
  return x;
}

std::vector<int> InternLabels(std::span<const LabelledEmbedding> set, bool speaker) {
  std::unordered_map<std::string, int> ids;
  std::vector<int> out;
  out.reserve(set.size());
  for (const auto &e : set) {
    const std::string &key = speaker ? e.speaker_id : e.word_type;
    out.push_back(ids.try_emplace(key, static_cast<int>(ids.size())).first->second);
  }
  return out;
}

}  // namespace

std::vector<double> PairwiseCosineDistances(std::span<const Embedding> set, int num_threads) {
  if (set.size() < 2) throw Error("pairwise distances need at least 2 embeddings");
  return DistancesOfUnitRows(UnitRows(set.size(), [&](std::size_t i) -> const Embedding & { return set[i]; }),
                             num_threads);
}

std::vector<double> PairwiseCosineDistances(std::span<const LabelledEmbedding> set,
                                            int num_threads) {
  if (set.size() < 2) throw Error("pairwise distances need at least 2 embeddings");
  return DistancesOfUnitRows(
      UnitRows(set.size(), [&](std::size_t i) -> const Embedding & { return set[i].z; }),
      num_threads);
}

ApResult SameDiffApFromDistances(std::span<const double> distances,
                                 std::span<const int> word_ids,
                                 std::span<const int> speaker_ids, bool with_curve) {
  const std::uint64_t n = word_ids.size();
  if (speaker_ids.size() != n) throw Error("label lists differ in length");
  if (distances.size() != n * (n - 1) / 2)
    throw Error("distance list does not match the number of items");

  // The low bit of `tag` marks a positive; the rest is the pair index, so
  // comparing tags breaks distance ties by pair index.
  struct Key {
    double d;
    std::uint64_t tag;
  };
  std::vector<Key> keys;
  keys.reserve(distances.size());
  std::uint64_t p = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::uint64_t base = PairIndex(n, i, i + 1);
    for (std::uint64_t j = i + 1; j < n; ++j) {
      const bool same_word = word_ids[i] == word_ids[j];
      const bool same_speaker = speaker_ids[i] == speaker_ids[j];
      if (same_word && same_speaker) continue;
      const std::uint64_t idx = base + (j - i - 1);
      keys.push_back({distances[idx], idx * 2 + (same_word ? 1 : 0)});
      p += same_word ? 1 : 0;
    }
  }
  if (p == 0) throw Error("AP undefined: no same-word different-speaker pair");

  std::sort(keys.begin(), keys.end(), [](const Key &a, const Key &b) {
    return a.d < b.d || (a.d == b.d && a.tag < b.tag);
  });

  ApResult result;
  result.n_positive_pairs = p;
  result.n_scored_pairs = keys.size();
  if (with_curve) result.pr_curve.reserve(p);
  double sum = 0.0;
  std::uint64_t hits = 0;
  for (std::uint64_t k = 0; k < keys.size(); ++k) {
    if ((keys[k].tag & 1) == 0) continue;
    ++hits;
    const double precision = static_cast<double>(hits) / static_cast<double>(k + 1);
    sum += precision;
    if (with_curve)
      result.pr_curve.push_back({precision, static_cast<double>(hits) / static_cast<double>(p)});
  }
  result.ap = sum / static_cast<double>(p);
  return result;
}

ApResult SameDiffAp(std::span<const LabelledEmbedding> set, bool with_curve, int num_threads) {
  const std::vector<double> d = PairwiseCosineDistances(set, num_threads);
  const std::vector<int> words = InternLabels(set, false);
  const std::vector<int> speakers = InternLabels(set, true);
  return SameDiffApFromDistances(d, words, speakers, with_curve);
}

std::vector<Embedding> EncodeMany(const EncoderParams &params, const EncoderConfig &cfg,
                                  std::span<const FeatureMatrix> seqs, int num_threads) {
  std::vector<std::size_t> order(seqs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return seqs[a].rows() > seqs[b].rows();
  });
  std::vector<Embedding> out(seqs.size());
  const std::size_t chunks = (seqs.size() + kEncodeChunk - 1) / kEncodeChunk;
  ParallelFor(chunks, [&](std::size_t c) {
    const std::size_t lo = c * kEncodeChunk, hi = std::min(seqs.size(), lo + kEncodeChunk);
    std::vector<const FeatureMatrix *> ptrs;
    for (std::size_t k = lo; k < hi; ++k) ptrs.push_back(&seqs[order[k]]);
    EncoderPass<float> pass(params, cfg);
    const Eigen::MatrixXf z = pass.Forward(ptrs, false);
    for (std::size_t k = lo; k < hi; ++k) out[order[k]] = z.col(static_cast<Eigen::Index>(k - lo));
  }, num_threads);
  return out;
}

std::vector<LabelledEmbedding> EmbedSegments(const EncoderParams &params,
                                             const EncoderConfig &cfg,
                                             const FeatureArchive &archive,
                                             std::span<const WordSegment> segments,
                                             int num_threads) {
  std::vector<FeatureMatrix> slices;
  slices.reserve(segments.size());
  for (const auto &seg : segments) slices.push_back(SliceSegment(archive, seg));
  std::vector<Embedding> z = EncodeMany(params, cfg, slices, num_threads);
  std::vector<LabelledEmbedding> out(segments.size());
  for (std::size_t i = 0; i < segments.size(); ++i)
    out[i] = {std::move(z[i]), segments[i].word_type, segments[i].speaker_id};
  return out;
}

void WriteApReport(const std::string &path, std::size_t n_items, const ApResult &result) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  os << "n_items,n_scored,n_pos,ap\n"
     << fmt::format("{},{},{},{:.6f}\n", n_items, result.n_scored_pairs,
                    result.n_positive_pairs, result.ap);
}

void WritePrCurve(const std::string &path, const ApResult &result) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  os << "precision,recall\n";
  for (const auto &pt : result.pr_curve) os << fmt::format("{:.6f},{:.6f}\n", pt.precision, pt.recall);
}

}  // namespace awe
