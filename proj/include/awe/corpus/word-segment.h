// include/awe/corpus/word-segment.h

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

#ifndef AWE_CORPUS_WORD_SEGMENT_H_
#define AWE_CORPUS_WORD_SEGMENT_H_

#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

#include "awe/feats/feature-archive.h"

namespace awe {

/// Labelled word token: frames [start_frame, end_frame) of an utterance.
struct WordSegment {
  std::string utterance_id;
  std::string word_type;
  std::string speaker_id;
  std::string language_id;
  std::uint32_t start_frame = 0;
  std::uint32_t end_frame = 0;

  std::uint32_t NumFrames() const { return end_frame - start_frame; }

  /// Occurrence identity: the same span of the same utterance.
  bool SameOccurrence(const WordSegment &o) const {
    return utterance_id == o.utterance_id && start_frame == o.start_frame &&
           end_frame == o.end_frame;
  }
  friend bool operator==(const WordSegment &, const WordSegment &) = default;
  friend auto operator<=>(const WordSegment &a, const WordSegment &b) {
    return std::tie(a.utterance_id, a.start_frame, a.end_frame, a.word_type,
                    a.speaker_id, a.language_id) <=>
           std::tie(b.utterance_id, b.start_frame, b.end_frame, b.word_type,
                    b.speaker_id, b.language_id);
  }
};

/// Segments shorter than this are dropped before embedding.
inline constexpr std::uint32_t kMinSegmentFrames = 4;

/// Parses one TSV record: utt, word, speaker, language, start, end.
/// Throws (without the line number) on any malformed field.
WordSegment ParseAlignmentLine(const std::string &line);
std::string FormatAlignmentLine(const WordSegment &seg);

/// Loads a TSV alignment file ('#' comments and blank lines allowed). Errors
/// name the offending line; nothing is returned on failure. When `archive`
/// is given, every segment must lie within its utterance.
std::vector<WordSegment> LoadAlignments(const std::string &path,
                                        const FeatureArchive *archive = nullptr);
void WriteAlignments(const std::string &path,
                     const std::vector<WordSegment> &segments);

/// Throws if a segment references a missing utterance or out-of-range frames.
void CheckSegmentsAgainstArchive(const std::vector<WordSegment> &segments,
                                 const FeatureArchive &archive);

/// Drops segments shorter than `min_frames`, logging one warning summary.
std::vector<WordSegment> DropShortSegments(std::vector<WordSegment> segments,
                                           std::uint32_t min_frames = kMinSegmentFrames);

/// Copies the segment's frames out of the archive.
FeatureMatrix SliceSegment(const FeatureArchive &archive, const WordSegment &seg);

}  // namespace awe

#endif  // AWE_CORPUS_WORD_SEGMENT_H_
