// src/corpus/word-segment.cc

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

#include "awe/corpus/word-segment.h"

#include <charconv>
#include <fstream>
#include <sstream>

#include <spdlog/spdlog.h>

namespace awe {

namespace {

std::vector<std::string> SplitTabs(const std::string &line) {
  std::vector<std::string> fields;
  std::size_t begin = 0;
  while (true) {
    std::size_t tab = line.find('\t', begin);
    fields.push_back(line.substr(begin, tab - begin));
    if (tab == std::string::npos) break;
    begin = tab + 1;
  }
  return fields;
}

std::uint32_t ParseFrame(const std::string &s, const char *what) {
  std::uint32_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw Error(std::string("bad ") + what + " '" + s + "'");
  return v;
}

}  // namespace

WordSegment ParseAlignmentLine(const std::string &raw) {
  std::string line = raw;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto f = SplitTabs(line);
  if (f.size() != 6)
    throw Error("expected 6 tab-separated fields, got " + std::to_string(f.size()));
  for (int i = 0; i < 4; ++i)
    if (f[i].empty()) throw Error("empty field " + std::to_string(i + 1));
  WordSegment seg{f[0], f[1], f[2], f[3], ParseFrame(f[4], "start_frame"),
                  ParseFrame(f[5], "end_frame")};
  if (seg.end_frame <= seg.start_frame)
    throw Error("end_frame " + f[5] + " <= start_frame " + f[4]);
  return seg;
}

std::string FormatAlignmentLine(const WordSegment &s) {
  std::ostringstream os;
  os << s.utterance_id << '\t' << s.word_type << '\t' << s.speaker_id << '\t'
     << s.language_id << '\t' << s.start_frame << '\t' << s.end_frame;
  return os.str();
}

std::vector<WordSegment> LoadAlignments(const std::string &path,
                                        const FeatureArchive *archive) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open alignment file " + path);
  std::vector<WordSegment> segments;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    try {
      segments.push_back(ParseAlignmentLine(line));
    } catch (const Error &e) {
      throw Error(path + ": line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (archive) CheckSegmentsAgainstArchive(segments, *archive);
  return segments;
}

void WriteAlignments(const std::string &path,
                     const std::vector<WordSegment> &segments) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "# utterance_id\tword_type\tspeaker_id\tlanguage_id\tstart_frame\tend_frame\n";
  for (const auto &s : segments) out << FormatAlignmentLine(s) << '\n';
}

void CheckSegmentsAgainstArchive(const std::vector<WordSegment> &segments,
                                 const FeatureArchive &archive) {
  for (const auto &s : segments) {
    const FeatureSequence *f = archive.Find(s.utterance_id);
    if (!f) throw Error("segment references missing utterance id '" + s.utterance_id + "'");
    if (s.end_frame > static_cast<std::uint32_t>(f->NumFrames()))
      throw Error("segment " + FormatAlignmentLine(s) + " exceeds utterance length " +
                  std::to_string(f->NumFrames()));
  }
}

std::vector<WordSegment> DropShortSegments(std::vector<WordSegment> segments,
                                           std::uint32_t min_frames) {
  std::size_t before = segments.size();
  std::erase_if(segments, [&](const WordSegment &s) { return s.NumFrames() < min_frames; });
  if (segments.size() != before)
    spdlog::warn("dropped {} segments shorter than {} frames", before - segments.size(),
                 min_frames);
  return segments;
}

FeatureMatrix SliceSegment(const FeatureArchive &archive, const WordSegment &seg) {
  const FeatureSequence &f = archive.At(seg.utterance_id);
  if (seg.end_frame > static_cast<std::uint32_t>(f.NumFrames()) ||
      seg.start_frame >= seg.end_frame)
    throw Error("segment out of bounds: " + FormatAlignmentLine(seg));
  return f.frames.middleRows(seg.start_frame, seg.NumFrames());
}

}  // namespace awe
