// include/awe/corpus/pairs.h

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

#ifndef AWE_CORPUS_PAIRS_H_
#define AWE_CORPUS_PAIRS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "awe/corpus/word-segment.h"

namespace awe {

/// Two distinct occurrences of the same word type.
struct PositivePair {
  WordSegment anchor;
  WordSegment positive;
};

/// Samples min(n_pairs, available) pairs per group, uniformly and without
/// replacement from the universe of unordered same-type occurrence pairs.
/// Groups are languages when `per_language`, otherwise the whole input.
/// Exact duplicate occurrences in the input are collapsed first. Output is
/// grouped by sorted language id and is a pure function of (input set, seed).
/// Throws listing every language that has no same-type pair.
std::vector<PositivePair> MinePairs(const std::vector<WordSegment> &segments,
                                    std::uint64_t n_pairs, bool per_language,
                                    std::uint64_t seed);

/// Number of unordered same-type pairs available in `segments`.
std::uint64_t CountPairUniverse(const std::vector<WordSegment> &segments);

// Pair TSV: the anchor's six alignment fields followed by the positive's.
void WritePairs(const std::string &path, const std::vector<PositivePair> &pairs);
std::vector<PositivePair> ReadPairs(const std::string &path);

}  // namespace awe

#endif  // AWE_CORPUS_PAIRS_H_
