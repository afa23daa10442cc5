// include/awe/feats/feature-archive.h

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

#ifndef AWE_FEATS_FEATURE_ARCHIVE_H_
#define AWE_FEATS_FEATURE_ARCHIVE_H_

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "awe/feats/mfcc.h"

namespace awe {

// AWEF layout (all little-endian):
//   "AWEF" | version u32 = 1 | count u32 |
//   count x { id_len u32 | id bytes | T u32 | D u32 | T*D f32, row-major }

inline constexpr std::uint32_t kFeatureArchiveVersion = 1;

/// Throws if utterance ids are not unique.
void WriteFeatureArchive(std::span<const FeatureSequence> feats,
                         const std::string &path);
std::vector<FeatureSequence> ReadFeatureArchive(const std::string &path);

/// In-memory archive with lookup by utterance id.
class FeatureArchive {
 public:
  FeatureArchive() = default;
  explicit FeatureArchive(std::vector<FeatureSequence> feats);
  static FeatureArchive Load(const std::string &path) {
    return FeatureArchive(ReadFeatureArchive(path));
  }

  /// Throws "missing utterance id" if absent.
  const FeatureSequence &At(const std::string &utterance_id) const;
  const FeatureSequence *Find(const std::string &utterance_id) const;
  const std::vector<FeatureSequence> &all() const { return feats_; }
  std::size_t size() const { return feats_.size(); }
  bool empty() const { return feats_.empty(); }

  /// Appends all entries of `other`; ids must stay unique.
  void Merge(const FeatureArchive &other);

 private:
  std::vector<FeatureSequence> feats_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace awe

#endif  // AWE_FEATS_FEATURE_ARCHIVE_H_
