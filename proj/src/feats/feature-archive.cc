// src/feats/feature-archive.cc

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

#include "awe/feats/feature-archive.h"

#include <fstream>
#include <unordered_set>

#include "awe/base/binary-io.h"

namespace awe {

void WriteFeatureArchive(std::span<const FeatureSequence> feats,
                         const std::string &path) {
  std::unordered_set<std::string> seen;
  for (const auto &f : feats)
    if (!seen.insert(f.utterance_id).second)
      throw Error("duplicate utterance id '" + f.utterance_id +
                  "' in feature archive");

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  WriteMagic(out, "AWEF");
  WriteU32(out, kFeatureArchiveVersion);
  WriteU32(out, static_cast<std::uint32_t>(feats.size()));
  for (const auto &f : feats) {
    WriteString(out, f.utterance_id);
    WriteU32(out, static_cast<std::uint32_t>(f.frames.rows()));
    WriteU32(out, static_cast<std::uint32_t>(f.frames.cols()));
    WriteF32s(out, std::span<const float>(f.frames.data(), f.frames.size()));
  }
  if (!out) throw Error("write failed for " + path);
}

std::vector<FeatureSequence> ReadFeatureArchive(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  ExpectMagic(in, "AWEF", path);
  std::uint32_t version = ReadU32(in, "AWEF version");
  if (version != kFeatureArchiveVersion)
    throw Error(path + ": unsupported AWEF version " + std::to_string(version));
  std::uint32_t count = ReadU32(in, "AWEF entry count");
  std::vector<FeatureSequence> feats;
  feats.reserve(std::min<std::uint32_t>(count, 1u << 20));
  for (std::uint32_t i = 0; i < count; ++i) {
    FeatureSequence f;
    f.utterance_id = ReadString(in, "AWEF utterance id");
    std::uint32_t rows = ReadU32(in, "AWEF rows");
    std::uint32_t cols = ReadU32(in, "AWEF cols");
    if (static_cast<std::uint64_t>(rows) * cols > (1ull << 32))
      throw Error(path + ": implausible matrix size for " + f.utterance_id);
    f.frames.resize(rows, cols);
    ReadF32s(in, std::span<float>(f.frames.data(), f.frames.size()),
             "AWEF payload");
    feats.push_back(std::move(f));
  }
  return feats;
}

FeatureArchive::FeatureArchive(std::vector<FeatureSequence> feats)
    : feats_(std::move(feats)) {
  for (std::size_t i = 0; i < feats_.size(); ++i)
    if (!index_.emplace(feats_[i].utterance_id, i).second)
      throw Error("duplicate utterance id '" + feats_[i].utterance_id + "'");
}

const FeatureSequence *FeatureArchive::Find(const std::string &utterance_id) const {
  auto it = index_.find(utterance_id);
  return it == index_.end() ? nullptr : &feats_[it->second];
}

const FeatureSequence &FeatureArchive::At(const std::string &utterance_id) const {
  const FeatureSequence *f = Find(utterance_id);
  if (!f) throw Error("missing utterance id '" + utterance_id + "'");
  return *f;
}

void FeatureArchive::Merge(const FeatureArchive &other) {
  for (const auto &f : other.feats_) {
    if (!index_.emplace(f.utterance_id, feats_.size()).second)
      throw Error("duplicate utterance id '" + f.utterance_id + "' when merging");
    feats_.push_back(f);
  }
}

}  // namespace awe
