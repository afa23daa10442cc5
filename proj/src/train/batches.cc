// src/train/batches.cc

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

#include "awe/train/batches.h"

#include <algorithm>
#include <map>

#include "awe/base/common.h"

namespace awe {

namespace {

constexpr std::uint64_t kBatchStream = 0x62617463;  // "batc"

// Draws distinct table indices of a type other than `type`, not already in
// `taken`, until `out` has `want` entries.
void SampleFromTable(const SegmentTable &table, int type, std::size_t want,
                     std::vector<std::size_t> *out, Rng *rng) {
  const std::size_t need = want - out->size();
  if (table.CountOtherTypes(type) < want)
    throw Error("cannot draw " + std::to_string(want) +
                " negatives: only " + std::to_string(table.CountOtherTypes(type)) +
                " segments of a different word type");
  auto usable = [&](std::size_t idx) {
    return table.type_of(idx) != type &&
           std::find(out->begin(), out->end(), idx) == out->end();
  };
  // Rejection sampling is cheap unless the anchor's type dominates the
  // table; then switch to an explicit candidate list.
  std::size_t attempts = 64 * need + 64;
  while (out->size() < want && attempts-- > 0) {
    const std::size_t idx = rng->Below(table.size());
    if (usable(idx)) out->push_back(idx);
  }
  if (out->size() == want) return;
  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < table.size(); ++i)
    if (usable(i)) rest.push_back(i);
  while (out->size() < want) {
    const std::size_t j = rng->Below(rest.size());
    out->push_back(rest[j]);
    rest[j] = rest.back();
    rest.pop_back();
  }
}

}  // namespace

std::string NegativePolicyName(NegativePolicy p) {
  return p == NegativePolicy::kInBatch ? "in-batch" : "corpus-sampled";
}

NegativePolicy ParseNegativePolicy(const std::string &name) {
  if (name == "in-batch") return NegativePolicy::kInBatch;
  if (name == "corpus-sampled") return NegativePolicy::kCorpusSampled;
  throw Error("unknown negative policy '" + name + "' (expected in-batch or corpus-sampled)");
}

SegmentTable::SegmentTable(std::vector<WordSegment> segments,
                           std::span<const PositivePair> pairs) {
  for (const auto &p : pairs) {
    segments.push_back(p.anchor);
    segments.push_back(p.positive);
  }
  std::sort(segments.begin(), segments.end());
  segments.erase(std::unique(segments.begin(), segments.end()), segments.end());
  segments_ = std::move(segments);

  std::map<std::string, int> ids;
  for (const auto &s : segments_) ids.emplace(s.word_type, 0);
  int next = 0;
  for (auto &[word, id] : ids) id = next++;
  type_counts_.assign(ids.size(), 0);
  for (const auto &s : segments_) {
    const int id = ids.at(s.word_type);
    type_ids_.push_back(id);
    ++type_counts_[id];
  }
}

std::size_t SegmentTable::IndexOf(const WordSegment &seg) const {
  auto it = std::lower_bound(segments_.begin(), segments_.end(), seg);
  if (it == segments_.end() || !(*it == seg))
    throw Error("segment not in table: " + FormatAlignmentLine(seg));
  return static_cast<std::size_t>(it - segments_.begin());
}

std::vector<std::vector<TrainingExample>> AssembleBatches(std::span<const IndexPair> pairs,
                                                          const SegmentTable &table,
                                                          const BatchConfig &cfg,
                                                          std::uint64_t seed, int epoch,
                                                          BatchStats *stats) {
  if (cfg.k_negatives < 1) throw Error("K must be at least 1");
  if (cfg.batch_pairs < 1) throw Error("batch_pairs must be at least 1");
  Rng rng(DeriveSeed(DeriveSeed(seed, kBatchStream), static_cast<std::uint64_t>(epoch)));
  std::vector<IndexPair> order(pairs.begin(), pairs.end());
  rng.Shuffle(order.begin(), order.end());

  const std::size_t k = static_cast<std::size_t>(cfg.k_negatives);
  const std::size_t bp = static_cast<std::size_t>(cfg.batch_pairs);
  std::vector<std::vector<TrainingExample>> batches;
  for (std::size_t lo = 0; lo < order.size(); lo += bp) {
    const std::size_t hi = std::min(order.size(), lo + bp);
    std::vector<std::size_t> members;
    if (cfg.policy == NegativePolicy::kInBatch) {
      for (std::size_t i = lo; i < hi; ++i) {
        members.push_back(order[i].anchor);
        members.push_back(order[i].positive);
      }
      std::sort(members.begin(), members.end());
      members.erase(std::unique(members.begin(), members.end()), members.end());
    }

    std::vector<TrainingExample> batch;
    batch.reserve(hi - lo);
    std::vector<std::size_t> candidates;
    for (std::size_t i = lo; i < hi; ++i) {
      TrainingExample ex{order[i].anchor, order[i].positive, {}};
      const int type = table.type_of(ex.anchor);
      if (cfg.policy == NegativePolicy::kInBatch) {
        candidates.clear();
        for (std::size_t m : members)
          if (table.type_of(m) != type) candidates.push_back(m);
        const std::size_t take = std::min(k, candidates.size());
        // Partial Fisher-Yates: the first `take` slots become the draw.
        for (std::size_t j = 0; j < take; ++j) {
          const std::size_t r = j + rng.Below(candidates.size() - j);
          std::swap(candidates[j], candidates[r]);
          ex.negatives.push_back(candidates[j]);
        }
        if (stats) stats->in_batch += take;
      }
      if (ex.negatives.size() < k) {
        const std::size_t before = ex.negatives.size();
        SampleFromTable(table, type, k, &ex.negatives, &rng);
        if (stats) stats->corpus += k - before;
      }
      batch.push_back(std::move(ex));
    }
    batches.push_back(std::move(batch));
  }
  return batches;
}

}  // namespace awe
