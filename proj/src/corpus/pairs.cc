// src/corpus/pairs.cc

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

#include "awe/corpus/pairs.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <unordered_set>

#include "awe/base/common.h"

namespace awe {

namespace {

using TypeGroups = std::map<std::string, std::vector<WordSegment>>;

TypeGroups GroupByType(std::vector<WordSegment> segments) {
  std::sort(segments.begin(), segments.end());
  segments.erase(std::unique(segments.begin(), segments.end(),
                             [](const WordSegment &a, const WordSegment &b) {
                               return a.SameOccurrence(b);
                             }),
                 segments.end());
  TypeGroups groups;
  for (auto &s : segments) groups[s.word_type].push_back(std::move(s));
  return groups;
}

std::uint64_t Choose2(std::uint64_t k) { return k < 2 ? 0 : k * (k - 1) / 2; }

// Maps r in [0, k(k-1)/2) to the r-th pair (i, j), i < j, in row-major order.
std::pair<std::uint64_t, std::uint64_t> DecodePair(std::uint64_t r, std::uint64_t k) {
  auto row_start = [k](std::uint64_t i) { return i * (2 * k - i - 1) / 2; };
  std::uint64_t lo = 0, hi = k - 1;  // row_start(lo) <= r < row_start(hi)
  while (hi - lo > 1) {
    std::uint64_t mid = (lo + hi) / 2;
    if (row_start(mid) <= r) lo = mid; else hi = mid;
  }
  return {lo, lo + 1 + (r - row_start(lo))};
}

std::vector<PositivePair> MineGroup(const TypeGroups &groups, std::uint64_t n_pairs,
                                    Rng *rng) {
  std::vector<const std::vector<WordSegment> *> types;
  std::vector<std::uint64_t> prefix{0};
  for (const auto &[type, occ] : groups) {
    if (occ.size() < 2) continue;
    types.push_back(&occ);
    prefix.push_back(prefix.back() + Choose2(occ.size()));
  }
  std::uint64_t universe = prefix.back();

  std::vector<std::uint64_t> picked;
  if (n_pairs >= universe) {
    picked.resize(universe);
    for (std::uint64_t i = 0; i < universe; ++i) picked[i] = i;
  } else {
    // Floyd's algorithm: n distinct draws from [0, universe).
    std::unordered_set<std::uint64_t> chosen;
    chosen.reserve(n_pairs * 2);
    for (std::uint64_t j = universe - n_pairs; j < universe; ++j) {
      std::uint64_t t = rng->Below(j + 1);
      if (!chosen.insert(t).second) chosen.insert(j);
    }
    picked.assign(chosen.begin(), chosen.end());
    std::sort(picked.begin(), picked.end());
  }
  rng->Shuffle(picked.begin(), picked.end());

  std::vector<PositivePair> pairs;
  pairs.reserve(picked.size());
  for (std::uint64_t idx : picked) {
    auto t = static_cast<std::size_t>(
        std::upper_bound(prefix.begin(), prefix.end(), idx) - prefix.begin() - 1);
    const auto &occ = *types[t];
    auto [i, j] = DecodePair(idx - prefix[t], occ.size());
    // Random orientation: the loss treats anchor and positive differently.
    if (rng->Next() & 1) std::swap(i, j);
    pairs.push_back({occ[i], occ[j]});
  }
  return pairs;
}

}  // namespace

std::uint64_t CountPairUniverse(const std::vector<WordSegment> &segments) {
  std::uint64_t total = 0;
  for (const auto &[type, occ] : GroupByType(segments)) total += Choose2(occ.size());
  return total;
}

std::vector<PositivePair> MinePairs(const std::vector<WordSegment> &segments,
                                    std::uint64_t n_pairs, bool per_language,
                                    std::uint64_t seed) {
  std::map<std::string, std::vector<WordSegment>> by_group;
  for (const auto &s : segments) by_group[per_language ? s.language_id : ""].push_back(s);
  if (by_group.empty()) throw Error("no segments to mine pairs from");

  std::vector<PositivePair> out;
  std::vector<std::string> empty_groups;
  for (const auto &[group, segs] : by_group) {
    TypeGroups types = GroupByType(segs);
    Rng rng(DeriveSeed(seed, Fnv1a64(group)));
    auto pairs = MineGroup(types, n_pairs, &rng);
    if (pairs.empty()) {
      empty_groups.push_back(group.empty() ? "<all>" : group);
      continue;
    }
    out.insert(out.end(), std::make_move_iterator(pairs.begin()),
               std::make_move_iterator(pairs.end()));
  }
  if (!empty_groups.empty()) {
    std::string list;
    for (const auto &g : empty_groups) list += (list.empty() ? "" : ", ") + g;
    throw Error("no word type with two or more occurrences for language(s): " + list);
  }
  return out;
}

void WritePairs(const std::string &path, const std::vector<PositivePair> &pairs) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  for (const auto &p : pairs)
    out << FormatAlignmentLine(p.anchor) << '\t' << FormatAlignmentLine(p.positive) << '\n';
}

std::vector<PositivePair> ReadPairs(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open pair file " + path);
  std::vector<PositivePair> pairs;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    // The sixth tab separates the anchor record from the positive record.
    std::size_t split = std::string::npos, from = 0;
    for (int tabs = 0; tabs < 6; ++tabs) {
      split = line.find('\t', from);
      if (split == std::string::npos) break;
      from = split + 1;
    }
    try {
      if (split == std::string::npos) throw Error("expected 12 tab-separated fields");
      PositivePair p{ParseAlignmentLine(line.substr(0, split)),
                     ParseAlignmentLine(line.substr(split + 1))};
      if (p.anchor.word_type != p.positive.word_type)
        throw Error("pair members have different word types");
      if (p.anchor.SameOccurrence(p.positive))
        throw Error("pair members are the same occurrence");
      pairs.push_back(std::move(p));
    } catch (const Error &e) {
      throw Error(path + ": line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return pairs;
}

}  // namespace awe
