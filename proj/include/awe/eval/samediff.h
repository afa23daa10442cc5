// include/awe/eval/samediff.h

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

#ifndef AWE_EVAL_SAMEDIFF_H_
#define AWE_EVAL_SAMEDIFF_H_

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "awe/corpus/word-segment.h"
#include "awe/encoder/checkpoint.h"
#include "awe/encoder/encoder.h"

namespace awe {

struct LabelledEmbedding {
  Embedding z;
  std::string word_type;
  std::string speaker_id;
};

struct PrPoint {
  double precision = 0.0;
  double recall = 0.0;
};

struct ApResult {
  double ap = 0.0;
  std::uint64_t n_positive_pairs = 0;
  std::uint64_t n_scored_pairs = 0;
  /// One point per positive hit, in rank order.
  std::vector<PrPoint> pr_curve;
};

/// Position of pair (i, j), i < j, in the compact upper-triangular list.
inline std::uint64_t PairIndex(std::uint64_t n, std::uint64_t i, std::uint64_t j) {
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

/// Cosine distances 1 - cos(z_i, z_j) for all i < j in row-major
/// upper-triangular order (see PairIndex), computed in double precision over
/// tiles of 1024 items. Throws naming the index of a zero-norm embedding.
std::vector<double> PairwiseCosineDistances(std::span<const Embedding> set,
                                            int num_threads = 0);
std::vector<double> PairwiseCosineDistances(std::span<const LabelledEmbedding> set,
                                            int num_threads = 0);

/// Speaker-invariant same-different AP. Pairs are ranked by ascending
/// distance with ties broken by pair index. Same-word different-speaker
/// pairs are positives, different-word pairs negatives, and same-word
/// same-speaker pairs are left out of the ranking. AP is the mean precision
/// at each positive hit. Throws "AP undefined" without a positive pair.
ApResult SameDiffAp(std::span<const LabelledEmbedding> set, bool with_curve = false,
                    int num_threads = 0);

/// Same ranking rule on precomputed distances; labels are small integer ids.
ApResult SameDiffApFromDistances(std::span<const double> distances,
                                 std::span<const int> word_ids,
                                 std::span<const int> speaker_ids, bool with_curve = false);

/// Slices and encodes each segment; output order follows `segments`.
std::vector<LabelledEmbedding> EmbedSegments(const EncoderParams &params,
                                             const EncoderConfig &cfg,
                                             const FeatureArchive &archive,
                                             std::span<const WordSegment> segments,
                                             int num_threads = 0);
inline std::vector<LabelledEmbedding> EmbedSegments(const Checkpoint &ckpt,
                                                    const FeatureArchive &archive,
                                                    std::span<const WordSegment> segments,
                                                    int num_threads = 0) {
  return EmbedSegments(ckpt.params, ckpt.config, archive, segments, num_threads);
}

/// Encodes many sequences in fixed length-sorted chunks; the chunking does
/// not depend on the thread count, so results are reproducible.
std::vector<Embedding> EncodeMany(const EncoderParams &params, const EncoderConfig &cfg,
                                  std::span<const FeatureMatrix> seqs, int num_threads = 0);

// Report: header "n_items,n_scored,n_pos,ap" and one row.
void WriteApReport(const std::string &path, std::size_t n_items, const ApResult &result);
// PR curve: header "precision,recall".
void WritePrCurve(const std::string &path, const ApResult &result);

}  // namespace awe

#endif  // AWE_EVAL_SAMEDIFF_H_
