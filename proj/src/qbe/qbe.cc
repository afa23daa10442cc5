// src/qbe/qbe.cc

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

#include "awe/qbe/qbe.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "awe/base/binary-io.h"
#include "awe/base/parallel.h"

namespace awe {

namespace {

constexpr char kIndexMagic[4] = {'A', 'W', 'E', 'I'};
// Recurrent passes (one per window start) grouped into one batch.
constexpr std::size_t kStartsPerChunk = 512;

}  // namespace

void WindowConfig::Validate() const {
  if (min_len < 1) throw Error("window min_len must be at least 1");
  if (min_len > max_len) throw Error("window min_len exceeds max_len");
  if (len_step < 1) throw Error("window len_step must be at least 1");
  if (stride < 1) throw Error("window stride must be at least 1");
}

std::vector<int> WindowConfig::Lengths() const {
  std::vector<int> out;
  for (int len = min_len; len <= max_len; len += len_step) out.push_back(len);
  return out;
}

std::vector<Window> EnumerateWindows(int num_frames, const WindowConfig &cfg) {
  cfg.Validate();
  if (num_frames < 1) throw Error("cannot index an empty utterance");
  if (num_frames < cfg.min_len) return {{0, static_cast<std::uint32_t>(num_frames)}};
  const std::vector<int> lengths = cfg.Lengths();
  std::vector<Window> out;
  for (int start = 0; start + cfg.min_len <= num_frames; start += cfg.stride)
    for (int len : lengths)
      if (start + len <= num_frames)
        out.push_back({static_cast<std::uint32_t>(start), static_cast<std::uint32_t>(len)});
  return out;
}

double RowNorm(const float *v, int dim) {
  double s = 0.0;
  for (int j = 0; j < dim; ++j) s += static_cast<double>(v[j]) * static_cast<double>(v[j]);
  return std::sqrt(s);
}

double WindowDistance(const float *u, double norm_u, const float *v, double norm_v, int dim) {
  if (norm_u == 0.0 || norm_v == 0.0) return 1.0;
  double dot = 0.0;
  for (int j = 0; j < dim; ++j) dot += static_cast<double>(u[j]) * static_cast<double>(v[j]);
  return 1.0 - dot / (norm_u * norm_v);
}

SegmentIndex BuildIndex(const EncoderParams &params, const EncoderConfig &enc_cfg,
                        const FeatureArchive &archive, const WindowConfig &wcfg,
                        int num_threads) {
  wcfg.Validate();
  params.CheckShapes(enc_cfg);
  if (archive.empty()) throw Error("cannot build an index from an empty archive");

  SegmentIndex index;
  index.windows_cfg = wcfg;
  index.embed_dim = enc_cfg.embed_dim;
  const auto &feats = archive.all();

  // One recurrent pass per (utterance, start); its longest window bounds
  // the frames it needs.
  struct Pass {
    std::size_t utt;
    std::uint32_t start;
    std::uint32_t frames;
    std::uint64_t first_row;  // row of the window (start, shortest length)
  };
  std::vector<Pass> passes;
  for (std::size_t u = 0; u < feats.size(); ++u) {
    const int t = static_cast<int>(feats[u].NumFrames());
    if (feats[u].Dim() != enc_cfg.input_dim)
      throw Error("feature dimension mismatch in utterance " + feats[u].utterance_id);
    std::vector<Window> wins = EnumerateWindows(t, wcfg);
    IndexedUtterance entry{feats[u].utterance_id, static_cast<std::uint32_t>(t),
                           index.windows.size(), static_cast<std::uint32_t>(wins.size()),
                           t < wcfg.min_len};
    for (std::size_t i = 0; i < wins.size(); ++i) {
      if (i == 0 || wins[i].start != wins[i - 1].start)
        passes.push_back({u, wins[i].start, 0, index.windows.size() + i});
      passes.back().frames = std::max(passes.back().frames, wins[i].length);
    }
    index.windows.insert(index.windows.end(), wins.begin(), wins.end());
    index.utterances.push_back(std::move(entry));
  }

  const std::size_t dim = static_cast<std::size_t>(enc_cfg.embed_dim);
  index.embeddings.assign(index.windows.size() * dim, 0.0f);
  index.norms.assign(index.windows.size(), 0.0);
  const std::vector<int> lengths = wcfg.Lengths();
  const std::size_t chunks = (passes.size() + kStartsPerChunk - 1) / kStartsPerChunk;

  ParallelFor(chunks, [&](std::size_t c) {
    const std::size_t lo = c * kStartsPerChunk;
    const std::size_t hi = std::min(passes.size(), lo + kStartsPerChunk);
    std::vector<FeatureMatrix> seqs;
    seqs.reserve(hi - lo);
    for (std::size_t p = lo; p < hi; ++p)
      seqs.push_back(feats[passes[p].utt].frames.middleRows(passes[p].start, passes[p].frames));
    std::vector<const FeatureMatrix *> ptrs;
    for (const auto &s : seqs) ptrs.push_back(&s);

    // Short utterances have a single window whose length is not on the grid.
    std::vector<int> wanted = lengths;
    for (std::size_t p = lo; p < hi; ++p)
      if (index.utterances[passes[p].utt].short_utterance) wanted.push_back(static_cast<int>(passes[p].frames));
    std::sort(wanted.begin(), wanted.end());
    wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());

    EncoderPass<float> pass(params, enc_cfg);
    const auto z = pass.ForwardPrefixes(ptrs, wanted);
    for (std::size_t p = lo; p < hi; ++p) {
      const bool is_short = index.utterances[passes[p].utt].short_utterance;
      std::uint64_t row = passes[p].first_row;
      for (std::size_t i = 0; i < wanted.size(); ++i) {
        const int len = wanted[i];
        const bool on_grid = is_short ? len == static_cast<int>(passes[p].frames)
                                      : std::binary_search(lengths.begin(), lengths.end(), len);
        if (!on_grid || len > static_cast<int>(passes[p].frames)) continue;
        const auto &e = z[p - lo][i];
        float *dst = index.embeddings.data() + row * dim;
        std::copy(e.data(), e.data() + dim, dst);
        index.norms[row] = RowNorm(dst, static_cast<int>(dim));
        ++row;
      }
    }
  }, num_threads);
  return index;
}

std::vector<UtteranceScore> ScoreUtterances(const SegmentIndex &index, const Embedding &query,
                                            int num_threads) {
  if (index.utterances.empty()) throw Error("empty index");
  if (query.size() != index.embed_dim) throw Error("query embedding dimension mismatch");
  const double qn = RowNorm(query.data(), index.embed_dim);
  std::vector<UtteranceScore> out(index.utterances.size());
  ParallelFor(index.utterances.size(), [&](std::size_t u) {
    const IndexedUtterance &utt = index.utterances[u];
    double best = std::numeric_limits<double>::infinity();
    for (std::uint64_t w = utt.first_window; w < utt.first_window + utt.num_windows; ++w)
      best = std::min(best, WindowDistance(query.data(), qn, index.Row(w), index.norms[w],
                                           index.embed_dim));
    out[u] = {utt.utterance_id, best};
  }, num_threads);
  std::sort(out.begin(), out.end(), [](const UtteranceScore &a, const UtteranceScore &b) {
    return a.score < b.score || (a.score == b.score && a.utterance_id < b.utterance_id);
  });
  return out;
}

double PrecisionAt10(const std::vector<UtteranceScore> &ranking, const GroundTruth &truth,
                     const std::string &word) {
  const std::size_t n = std::min<std::size_t>(10, ranking.size());
  if (n == 0) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    auto it = truth.find(ranking[i].utterance_id);
    if (it != truth.end() && it->second.count(word)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(n);
}

QbeResult RunQbe(const EncoderParams &params, const EncoderConfig &enc_cfg,
                 const QbeQuery &query, const FeatureArchive &query_archive,
                 const SegmentIndex &index, const GroundTruth &truth, bool pool_min,
                 int num_threads) {
  if (query.instances.empty()) throw Error("query " + query.query_word + " has no instances");
  bool known = false;
  for (const auto &[utt, words] : truth) known = known || words.count(query.query_word) > 0;
  if (!known) throw Error("query word " + query.query_word + " is absent from the ground truth");

  QbeResult result;
  result.query_word = query.query_word;
  for (const auto &u : index.utterances) {
    auto it = truth.find(u.utterance_id);
    if (it != truth.end() && it->second.count(query.query_word)) ++result.relevant_total;
  }

  std::map<std::string, double> pooled;
  for (const auto &inst : query.instances) {
    if (inst.NumFrames() < kMinSegmentFrames)
      throw Error("query segment shorter than " + std::to_string(kMinSegmentFrames) +
                  " frames: " + FormatAlignmentLine(inst));
    const Embedding q = Encode(params, enc_cfg, SliceSegment(query_archive, inst));
    std::vector<UtteranceScore> ranking = ScoreUtterances(index, q, num_threads);
    if (pool_min) {
      for (const auto &s : ranking) {
        auto [it, fresh] = pooled.try_emplace(s.utterance_id, s.score);
        if (!fresh) it->second = std::min(it->second, s.score);
      }
    } else {
      result.per_instance_p_at_10.push_back(PrecisionAt10(ranking, truth, query.query_word));
      if (result.ranking.empty()) result.ranking = std::move(ranking);
    }
  }
  if (pool_min) {
    for (const auto &[id, score] : pooled) result.ranking.push_back({id, score});
    std::sort(result.ranking.begin(), result.ranking.end(),
              [](const UtteranceScore &a, const UtteranceScore &b) {
                return a.score < b.score || (a.score == b.score && a.utterance_id < b.utterance_id);
              });
    result.p_at_10 = PrecisionAt10(result.ranking, truth, query.query_word);
  } else {
    double sum = 0.0;
    for (double p : result.per_instance_p_at_10) sum += p;
    result.p_at_10 = sum / static_cast<double>(result.per_instance_p_at_10.size());
  }
  return result;
}

std::vector<QbeQuery> GroupQueries(const std::vector<WordSegment> &instances) {
  std::map<std::string, std::vector<WordSegment>> by_word;
  for (const auto &s : instances) by_word[s.word_type].push_back(s);
  std::vector<QbeQuery> out;
  for (auto &[word, segs] : by_word) out.push_back({word, std::move(segs)});
  return out;
}

void WriteIndex(const SegmentIndex &index, const std::string &path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path);
  WriteMagic(os, kIndexMagic);
  WriteU32(os, kIndexVersion);
  const WindowConfig &w = index.windows_cfg;
  for (int v : {w.min_len, w.max_len, w.len_step, w.stride, index.embed_dim})
    WriteU32(os, static_cast<std::uint32_t>(v));
  WriteU32(os, static_cast<std::uint32_t>(index.utterances.size()));
  for (const auto &u : index.utterances) {
    WriteString(os, u.utterance_id);
    WriteU32(os, u.num_frames);
    WriteU32(os, u.num_windows);
    WriteU32(os, u.short_utterance ? 1 : 0);
    for (std::uint64_t i = u.first_window; i < u.first_window + u.num_windows; ++i) {
      WriteU32(os, index.windows[i].start);
      WriteU32(os, index.windows[i].length);
    }
  }
  WriteF32s(os, index.embeddings);
  if (!os) throw Error("write failed: " + path);
}

SegmentIndex ReadIndex(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  ExpectMagic(is, kIndexMagic, path);
  const std::uint32_t version = ReadU32(is, "version");
  if (version != kIndexVersion)
    throw Error(path + ": unsupported index version " + std::to_string(version));
  SegmentIndex index;
  index.windows_cfg.min_len = static_cast<int>(ReadU32(is, "min_len"));
  index.windows_cfg.max_len = static_cast<int>(ReadU32(is, "max_len"));
  index.windows_cfg.len_step = static_cast<int>(ReadU32(is, "len_step"));
  index.windows_cfg.stride = static_cast<int>(ReadU32(is, "stride"));
  index.embed_dim = static_cast<int>(ReadU32(is, "embed_dim"));
  index.windows_cfg.Validate();
  if (index.embed_dim < 1) throw Error(path + ": invalid embedding dimension");
  const std::uint32_t n = ReadU32(is, "utterance count");
  for (std::uint32_t k = 0; k < n; ++k) {
    IndexedUtterance u;
    u.utterance_id = ReadString(is, "utterance id");
    u.num_frames = ReadU32(is, "num_frames");
    u.num_windows = ReadU32(is, "num_windows");
    u.short_utterance = ReadU32(is, "short flag") != 0;
    u.first_window = index.windows.size();
    for (std::uint32_t i = 0; i < u.num_windows; ++i) {
      Window w;
      w.start = ReadU32(is, "window start");
      w.length = ReadU32(is, "window length");
      if (w.length == 0 || w.start + w.length > u.num_frames)
        throw Error(path + ": window out of bounds in " + u.utterance_id);
      index.windows.push_back(w);
    }
    index.utterances.push_back(std::move(u));
  }
  index.embeddings.resize(index.windows.size() * static_cast<std::size_t>(index.embed_dim));
  ReadF32s(is, index.embeddings, "embeddings");
  index.norms.resize(index.windows.size());
  for (std::size_t w = 0; w < index.windows.size(); ++w)
    index.norms[w] = RowNorm(index.Row(w), index.embed_dim);
  return index;
}

GroundTruth LoadGroundTruth(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path);
  GroundTruth truth;
  std::string line;
  for (int no = 1; std::getline(is, line); ++no) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size() ||
        line.find('\t', tab + 1) != std::string::npos)
      throw Error(path + ": line " + std::to_string(no) + ": expected utterance_id<TAB>word_type");
    truth[line.substr(0, tab)].insert(line.substr(tab + 1));
  }
  return truth;
}

void WriteGroundTruth(const std::string &path, const GroundTruth &truth) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  os << "# utterance_id\tword_type\n";
  for (const auto &[utt, words] : truth)
    for (const auto &w : words) os << utt << '\t' << w << '\n';
}

GroundTruth GroundTruthFromSegments(const std::vector<WordSegment> &segments) {
  GroundTruth truth;
  for (const auto &s : segments) truth[s.utterance_id].insert(s.word_type);
  return truth;
}

}  // namespace awe
