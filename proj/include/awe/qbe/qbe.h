// include/awe/qbe/qbe.h

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

#ifndef AWE_QBE_QBE_H_
#define AWE_QBE_QBE_H_

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "awe/corpus/word-segment.h"
#include "awe/encoder/checkpoint.h"
#include "awe/encoder/encoder.h"

namespace awe {

/// Sliding windows: every length min_len, min_len + len_step, ..., max_len
/// at every start 0, stride, 2 stride, ... that fits in the utterance.
struct WindowConfig {
  int min_len = 20;
  int max_len = 60;
  int len_step = 10;
  int stride = 3;

  void Validate() const;
  std::vector<int> Lengths() const;
  friend bool operator==(const WindowConfig &, const WindowConfig &) = default;
};

struct Window {
  std::uint32_t start = 0;
  std::uint32_t length = 0;
  friend bool operator==(const Window &, const Window &) = default;
};

/// Windows of an utterance with `num_frames` frames, ordered by start and
/// then length. Utterances shorter than min_len get one full-length window.
std::vector<Window> EnumerateWindows(int num_frames, const WindowConfig &cfg);

struct IndexedUtterance {
  std::string utterance_id;
  std::uint32_t num_frames = 0;
  std::uint64_t first_window = 0;
  std::uint32_t num_windows = 0;
  /// Shorter than min_len, so indexed as one full-length window.
  bool short_utterance = false;
};

/// Window embeddings of a search collection, stored as contiguous rows.
struct SegmentIndex {
  WindowConfig windows_cfg;
  int embed_dim = 0;
  std::vector<IndexedUtterance> utterances;
  std::vector<Window> windows;
  /// windows.size() x embed_dim, row-major.
  std::vector<float> embeddings;
  /// Euclidean norm of each row, accumulated in double.
  std::vector<double> norms;

  std::size_t NumWindows() const { return windows.size(); }
  const float *Row(std::uint64_t w) const {
    return embeddings.data() + w * static_cast<std::uint64_t>(embed_dim);
  }
};

/// Embeds every window of every utterance. Windows sharing a start are
/// taken from a single recurrent pass over that start's longest window.
SegmentIndex BuildIndex(const EncoderParams &params, const EncoderConfig &enc_cfg,
                        const FeatureArchive &archive, const WindowConfig &wcfg,
                        int num_threads = 0);

/// 1 - u.v / (|u| |v|) with the dot product and norms accumulated in double
/// in element order; the single distance formula used by all QbE scoring.
double WindowDistance(const float *u, double norm_u, const float *v, double norm_v, int dim);
double RowNorm(const float *v, int dim);

struct UtteranceScore {
  std::string utterance_id;
  double score = 0.0;
};

/// Score of each utterance = min cosine distance over its windows; sorted
/// ascending with ties broken by utterance id.
std::vector<UtteranceScore> ScoreUtterances(const SegmentIndex &index, const Embedding &query,
                                            int num_threads = 0);

/// utterance id -> word types it contains.
using GroundTruth = std::map<std::string, std::set<std::string>>;

struct QbeQuery {
  std::string query_word;
  std::vector<WordSegment> instances;
};

struct QbeResult {
  std::string query_word;
  /// Ranking for the first instance (or the pooled ranking with pool_min).
  std::vector<UtteranceScore> ranking;
  double p_at_10 = 0.0;
  std::uint64_t relevant_total = 0;
  std::vector<double> per_instance_p_at_10;
};

/// Precision of the top min(10, n) utterances.
double PrecisionAt10(const std::vector<UtteranceScore> &ranking, const GroundTruth &truth,
                     const std::string &word);

/// Each instance is embedded from `query_archive` and searched independently
/// and P@10 is averaged over instances; with pool_min, each utterance takes
/// its minimum score over instances and one ranking is evaluated.
QbeResult RunQbe(const EncoderParams &params, const EncoderConfig &enc_cfg,
                 const QbeQuery &query, const FeatureArchive &query_archive,
                 const SegmentIndex &index, const GroundTruth &truth, bool pool_min = false,
                 int num_threads = 0);

/// Groups alignment records into queries by word type (sorted).
std::vector<QbeQuery> GroupQueries(const std::vector<WordSegment> &instances);

// AWEI layout (little-endian): "AWEI" | version u32 = 1 |
//   min_len, max_len, len_step, stride, embed_dim u32 | utterance count u32 |
//   per utterance: id (u32 length + bytes), num_frames u32, num_windows u32,
//   short flag u32, then num_windows x (start u32, length u32) |
//   all window embeddings as f32, row-major.
inline constexpr std::uint32_t kIndexVersion = 1;
void WriteIndex(const SegmentIndex &index, const std::string &path);
SegmentIndex ReadIndex(const std::string &path);

/// Truth TSV: utterance_id <tab> word_type per line, '#' comments allowed.
GroundTruth LoadGroundTruth(const std::string &path);
void WriteGroundTruth(const std::string &path, const GroundTruth &truth);
/// Containment derived from word alignments.
GroundTruth GroundTruthFromSegments(const std::vector<WordSegment> &segments);

}  // namespace awe

#endif  // AWE_QBE_QBE_H_
