// include/awe/train/batches.h

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

#ifndef AWE_TRAIN_BATCHES_H_
#define AWE_TRAIN_BATCHES_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "awe/corpus/pairs.h"
#include "awe/corpus/word-segment.h"

namespace awe {

enum class NegativePolicy { kInBatch, kCorpusSampled };

std::string NegativePolicyName(NegativePolicy p);
NegativePolicy ParseNegativePolicy(const std::string &name);

/// Deduplicated, sorted segment list with integer word-type ids. Training
/// works on indices into this table.
class SegmentTable {
 public:
  SegmentTable() = default;
  /// Takes the union of `segments` and every member of `pairs`.
  SegmentTable(std::vector<WordSegment> segments, std::span<const PositivePair> pairs);

  std::size_t size() const { return segments_.size(); }
  const WordSegment &at(std::size_t i) const { return segments_[i]; }
  const std::vector<WordSegment> &segments() const { return segments_; }
  int type_of(std::size_t i) const { return type_ids_[i]; }
  std::size_t num_types() const { return type_counts_.size(); }
  /// Number of segments whose type differs from `type`.
  std::size_t CountOtherTypes(int type) const { return size() - type_counts_[type]; }
  /// Index of an occurrence; throws if absent.
  std::size_t IndexOf(const WordSegment &seg) const;

 private:
  std::vector<WordSegment> segments_;
  std::vector<int> type_ids_;
  std::vector<std::size_t> type_counts_;
};

struct IndexPair {
  std::size_t anchor = 0;
  std::size_t positive = 0;
};

/// Anchor, positive and K negatives, as indices into a SegmentTable.
struct TrainingExample {
  std::size_t anchor = 0;
  std::size_t positive = 0;
  std::vector<std::size_t> negatives;
};

struct BatchConfig {
  int k_negatives = 20;
  int batch_pairs = 100;
  NegativePolicy policy = NegativePolicy::kInBatch;
};

/// Counts of how negatives were obtained, for logging and tests.
struct BatchStats {
  std::uint64_t in_batch = 0;
  std::uint64_t corpus = 0;
};

/// One epoch of batches. Pairs are shuffled with a stream derived from
/// (seed, epoch), then cut into batches of batch_pairs. Each example gets K
/// distinct negatives of a different word type: with the in-batch policy
/// they are drawn from the anchors and positives of its own batch, and any
/// shortfall is sampled from the whole table; with the corpus policy all K
/// come from the table. Throws if the table cannot supply K negatives.
std::vector<std::vector<TrainingExample>> AssembleBatches(std::span<const IndexPair> pairs,
                                                          const SegmentTable &table,
                                                          const BatchConfig &cfg,
                                                          std::uint64_t seed, int epoch,
                                                          BatchStats *stats = nullptr);

}  // namespace awe

#endif  // AWE_TRAIN_BATCHES_H_
