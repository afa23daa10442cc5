// tests/qbe-test.cc

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

#include <algorithm>
#include <fstream>

#include <gtest/gtest.h>

#include "awe/qbe/qbe.h"
#include "oracles.h"
#include "test-util.h"

namespace awe {
namespace {

using awe::testing::RandomFeatures;
using awe::testing::TempDir;

using oracle::MeanPoolIndex;

std::vector<FeatureSequence> RandomUtterances(int n, int dim, Rng *rng, int min_t = 5, int max_t = 60) {
  std::vector<FeatureSequence> out;
  for (int i = 0; i < n; ++i)
    out.push_back({"utt" + std::to_string(i),
                   RandomFeatures(min_t + static_cast<int>(rng->Below(max_t - min_t + 1)), dim, rng)});
  return out;
}

TEST(WindowTest, BoundaryLengths) {
  const WindowConfig cfg;
  EXPECT_EQ(cfg.Lengths(), (std::vector<int>{20, 30, 40, 50, 60}));
  EXPECT_EQ(EnumerateWindows(20, cfg), (std::vector<Window>{{0, 20}}));
  EXPECT_EQ(EnumerateWindows(26, cfg), (std::vector<Window>{{0, 20}, {3, 20}, {6, 20}}));
  // Too short for any window: one window spanning the utterance.
  EXPECT_EQ(EnumerateWindows(12, cfg), (std::vector<Window>{{0, 12}}));
}

TEST(WindowTest, CountsMatchDoubleLoop) {
  Rng rng(1);
  for (WindowConfig cfg : {WindowConfig{}, WindowConfig{8, 24, 4, 2}, WindowConfig{5, 7, 3, 1}}) {
    for (int i = 0; i < 10; ++i) {
      const int T = 1 + static_cast<int>(rng.Below(200));
      const auto w = EnumerateWindows(T, cfg);
      EXPECT_EQ(static_cast<int>(w.size()), oracle::CountWindows(T, cfg)) << T;
      for (const auto &x : w) EXPECT_LE(x.start + x.length, static_cast<std::uint32_t>(T));
      EXPECT_TRUE(std::is_sorted(w.begin(), w.end(), [](const Window &a, const Window &b) {
        return std::tie(a.start, a.length) < std::tie(b.start, b.length);
      }));
    }
  }
}

TEST(WindowTest, RejectsBadConfigs) {
  EXPECT_THROW((WindowConfig{30, 20, 10, 3}.Validate()), Error);
  EXPECT_THROW((WindowConfig{20, 60, 0, 3}.Validate()), Error);
  EXPECT_THROW((WindowConfig{20, 60, 10, 0}.Validate()), Error);
  EXPECT_NO_THROW((WindowConfig{20, 20, 1, 1}.Validate()));
}

TEST(ScoreTest, EqualsLinearScanExactly) {
  Rng rng(2);
  const WindowConfig wcfg{8, 24, 4, 2};
  for (int trial = 0; trial < 5; ++trial) {
    const auto index = MeanPoolIndex(RandomUtterances(12, 6, &rng), wcfg);
    ASSERT_LE(index.NumWindows(), 1000u);
    for (int q = 0; q < 5; ++q) {
      Embedding query(6);
      for (int k = 0; k < 6; ++k) query(k) = static_cast<float>(rng.Normal());
      const auto got = ScoreUtterances(index, query);
      const auto want = oracle::LinearScan(index, query);
      ASSERT_EQ(got.size(), want.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        EXPECT_EQ(got[i].utterance_id, want[i].utterance_id);
        EXPECT_EQ(got[i].score, want[i].score);
      }
      const auto threaded = ScoreUtterances(index, query, 3);
      for (std::size_t i = 0; i < got.size(); ++i) EXPECT_EQ(threaded[i].score, got[i].score);
    }
  }
}

TEST(ScoreTest, ExactWindowMatchRanksFirst) {
  Rng rng(3);
  const auto index = MeanPoolIndex(RandomUtterances(10, 5, &rng, 30, 50), WindowConfig{10, 20, 5, 3});
  const std::uint64_t w = index.utterances[6].first_window + 2;
  const Embedding query = Eigen::Map<const Embedding>(index.Row(w), 5);
  const auto ranking = ScoreUtterances(index, query);
  EXPECT_EQ(ranking[0].utterance_id, "utt6");
  EXPECT_NEAR(ranking[0].score, 0.0, 1e-12);
}

TEST(ScoreTest, SingleUtteranceIsAlwaysReturned) {
  Rng rng(4);
  const auto index = MeanPoolIndex(RandomUtterances(1, 5, &rng), WindowConfig{4, 8, 2, 2});
  Embedding query(5);
  query << 1, -1, 0, 0, 0;
  const auto ranking = ScoreUtterances(index, query);
  ASSERT_EQ(ranking.size(), 1u);
  EXPECT_EQ(ranking[0].utterance_id, "utt0");
}

TEST(ScoreTest, ExtraWindowsOnlyLowerTheScore) {
  Rng rng(5);
  const WindowConfig wcfg{8, 16, 4, 4};
  auto feats = RandomUtterances(8, 4, &rng, 20, 40);
  const auto small = MeanPoolIndex(feats, wcfg);
  const auto dense = MeanPoolIndex(feats, WindowConfig{8, 16, 4, 1});
  for (int q = 0; q < 10; ++q) {
    Embedding query(4);
    for (int k = 0; k < 4; ++k) query(k) = static_cast<float>(rng.Normal());
    std::map<std::string, double> before;
    for (const auto &s : ScoreUtterances(small, query)) before[s.utterance_id] = s.score;
    for (const auto &s : ScoreUtterances(dense, query)) EXPECT_LE(s.score, before[s.utterance_id]);
  }
}

TEST(ScoreTest, InsertionOrderDoesNotMatter) {
  Rng rng(6);
  const WindowConfig wcfg{8, 16, 4, 2};
  auto feats = RandomUtterances(15, 4, &rng);
  const auto forward = MeanPoolIndex(feats, wcfg);
  std::reverse(feats.begin(), feats.end());
  const auto backward = MeanPoolIndex(feats, wcfg);
  Embedding query(4);
  query << 0.3f, -1, 2, 0.5f;
  const auto a = ScoreUtterances(forward, query), b = ScoreUtterances(backward, query);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].utterance_id, b[i].utterance_id);
    EXPECT_EQ(a[i].score, b[i].score);
  }
}

TEST(PlantedQueryTest, PlantsOccupyTheTopRanks) {
  const auto corpus = oracle::MakePlantedCorpus(7);
  const auto &feats = corpus.feats;
  const auto &planted = corpus.planted;
  const auto index = MeanPoolIndex(feats, WindowConfig{});
  const Embedding &query = corpus.query;
  const auto ranking = ScoreUtterances(index, query);
  const auto brute = oracle::LinearScan(index, query);
  ASSERT_EQ(planted.size(), 5u);
  for (int r = 0; r < 5; ++r) {
    EXPECT_TRUE(planted.count(ranking[r].utterance_id)) << "rank " << r;
    EXPECT_LT(ranking[r].score, 1.0);
    EXPECT_EQ(ranking[r].utterance_id, brute[r].utterance_id);
  }
  for (std::size_t r = 5; r < ranking.size(); ++r) EXPECT_EQ(ranking[r].score, 1.0);

  GroundTruth truth;
  for (const auto &f : feats) truth[f.utterance_id] = {"filler"};
  for (const auto &id : planted) truth[id].insert("word");
  EXPECT_DOUBLE_EQ(PrecisionAt10(ranking, truth, "word"), 0.5);
}

TEST(PrecisionTest, AllNoneAndShortRankings) {
  std::vector<UtteranceScore> ranking;
  GroundTruth truth;
  for (int i = 0; i < 15; ++i) {
    const std::string id = "u" + std::to_string(i);
    ranking.push_back({id, i * 0.1});
    truth[id] = {"yes"};
  }
  EXPECT_EQ(PrecisionAt10(ranking, truth, "yes"), 1.0);
  EXPECT_EQ(PrecisionAt10(ranking, truth, "no"), 0.0);
  truth["u0"] = {"no"};
  truth["u14"] = {"no"};
  EXPECT_DOUBLE_EQ(PrecisionAt10(ranking, truth, "no"), 0.1);
  // Fewer than ten utterances: precision over all of them.
  ranking.resize(4);
  EXPECT_DOUBLE_EQ(PrecisionAt10(ranking, truth, "no"), 0.25);
}

TEST(PrecisionTest, RandomScorerMatchesRelevantFraction) {
  const int n = 100, relevant = 30;
  GroundTruth truth;
  for (int i = 0; i < n; ++i) truth["u" + std::to_string(i)] = {i < relevant ? "w" : "x"};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    double sum = 0;
    const int rounds = 50;
    for (int r = 0; r < rounds; ++r) {
      std::vector<UtteranceScore> ranking;
      for (int i = 0; i < n; ++i) ranking.push_back({"u" + std::to_string(i), rng.Uniform()});
      std::sort(ranking.begin(), ranking.end(),
                [](const auto &a, const auto &b) { return a.score < b.score; });
      sum += PrecisionAt10(ranking, truth, "w");
    }
    EXPECT_NEAR(sum / rounds / (double(relevant) / n), 1.0, 0.2) << "seed " << seed;
  }
}

struct SmallModel {
  EncoderConfig cfg;
  EncoderParams params;
  SmallModel() {
    cfg.input_dim = 4;
    cfg.hidden_dim = 8;
    cfg.n_layers = 2;
    cfg.embed_dim = 6;
    params = InitParams(cfg, 11);
  }
};

TEST(BuildIndexTest, RowsEqualEncodedWindows) {
  Rng rng(8);
  SmallModel m;
  const WindowConfig wcfg{6, 14, 4, 3};
  auto feats = RandomUtterances(7, 4, &rng, 3, 40);
  FeatureArchive archive(feats);
  const auto index = BuildIndex(m.params, m.cfg, archive, wcfg, 1);
  ASSERT_EQ(index.utterances.size(), 7u);
  std::uint64_t expected_windows = 0;
  for (std::size_t u = 0; u < feats.size(); ++u) {
    const auto &iu = index.utterances[u];
    EXPECT_EQ(iu.utterance_id, feats[u].utterance_id);
    EXPECT_EQ(iu.first_window, expected_windows);
    EXPECT_EQ(iu.short_utterance, feats[u].NumFrames() < wcfg.min_len);
    EXPECT_EQ(static_cast<int>(iu.num_windows), oracle::CountWindows(feats[u].NumFrames(), wcfg));
    expected_windows += iu.num_windows;
    for (std::uint32_t k = 0; k < iu.num_windows; ++k) {
      const Window &w = index.windows[iu.first_window + k];
      const Embedding direct =
          Encode(m.params, m.cfg, FeatureMatrix(feats[u].frames.middleRows(w.start, w.length)));
      const Embedding row = Eigen::Map<const Embedding>(index.Row(iu.first_window + k), 6);
      EXPECT_LT((row - direct).cwiseAbs().maxCoeff(), 1e-5);
      EXPECT_NEAR(index.norms[iu.first_window + k], RowNorm(index.Row(iu.first_window + k), 6), 0.0);
    }
  }
  EXPECT_EQ(index.NumWindows(), expected_windows);

  const auto threaded = BuildIndex(m.params, m.cfg, archive, wcfg, 3);
  EXPECT_EQ(threaded.embeddings, index.embeddings);
  EXPECT_THROW(BuildIndex(m.params, m.cfg, FeatureArchive{}, wcfg), Error);
}

TEST(RunQbeTest, AveragesInstancesOrPoolsMinimum) {
  Rng rng(9);
  SmallModel m;
  const WindowConfig wcfg{6, 14, 4, 3};
  auto feats = RandomUtterances(14, 4, &rng, 20, 40);
  FeatureArchive archive(feats);
  const auto index = BuildIndex(m.params, m.cfg, archive, wcfg);
  GroundTruth truth;
  for (int i = 0; i < 14; ++i) truth["utt" + std::to_string(i)] = {i % 3 == 0 ? "hit" : "miss"};
  QbeQuery query{"hit", {{"utt0", "hit", "a", "L", 2, 12}, {"utt3", "hit", "b", "L", 5, 15}}};

  const auto r = RunQbe(m.params, m.cfg, query, archive, index, truth);
  ASSERT_EQ(r.per_instance_p_at_10.size(), 2u);
  EXPECT_DOUBLE_EQ(r.p_at_10, 0.5 * (r.per_instance_p_at_10[0] + r.per_instance_p_at_10[1]));
  EXPECT_EQ(r.relevant_total, 5u);
  const Embedding q0 = Encode(m.params, m.cfg, SliceSegment(archive, query.instances[0]));
  const auto direct = ScoreUtterances(index, q0);
  ASSERT_EQ(r.ranking.size(), direct.size());
  for (std::size_t i = 0; i < direct.size(); ++i) EXPECT_EQ(r.ranking[i].score, direct[i].score);

  const auto pooled = RunQbe(m.params, m.cfg, query, archive, index, truth, true);
  const Embedding q1 = Encode(m.params, m.cfg, SliceSegment(archive, query.instances[1]));
  std::map<std::string, double> best;
  for (const auto &s : ScoreUtterances(index, q0)) best[s.utterance_id] = s.score;
  for (const auto &s : ScoreUtterances(index, q1)) best[s.utterance_id] = std::min(best[s.utterance_id], s.score);
  for (const auto &s : pooled.ranking) EXPECT_EQ(s.score, best[s.utterance_id]);
  EXPECT_TRUE(pooled.per_instance_p_at_10.empty());

  QbeQuery absent{"nowhere", query.instances};
  EXPECT_THROW(RunQbe(m.params, m.cfg, absent, archive, index, truth), Error);
  QbeQuery tiny{"hit", {{"utt0", "hit", "a", "L", 2, 5}}};
  EXPECT_THROW(RunQbe(m.params, m.cfg, tiny, archive, index, truth), Error);
}

TEST(IndexFileTest, RoundTripIsExact) {
  TempDir dir;
  Rng rng(10);
  SmallModel m;
  FeatureArchive archive(RandomUtterances(5, 4, &rng, 3, 30));
  const auto index = BuildIndex(m.params, m.cfg, archive, WindowConfig{6, 14, 4, 3});
  WriteIndex(index, dir.File("a.awei"));
  const auto back = ReadIndex(dir.File("a.awei"));
  EXPECT_EQ(back.windows_cfg, index.windows_cfg);
  EXPECT_EQ(back.embed_dim, index.embed_dim);
  EXPECT_EQ(back.windows, index.windows);
  EXPECT_EQ(back.embeddings, index.embeddings);
  EXPECT_EQ(back.norms, index.norms);
  ASSERT_EQ(back.utterances.size(), index.utterances.size());
  for (std::size_t i = 0; i < back.utterances.size(); ++i) {
    EXPECT_EQ(back.utterances[i].utterance_id, index.utterances[i].utterance_id);
    EXPECT_EQ(back.utterances[i].short_utterance, index.utterances[i].short_utterance);
  }
  WriteIndex(back, dir.File("b.awei"));
  const std::string bytes = awe::testing::ReadBytes(dir.File("a.awei"));
  EXPECT_EQ(bytes, awe::testing::ReadBytes(dir.File("b.awei")));

  std::ofstream(dir.File("cut.awei"), std::ios::binary) << bytes.substr(0, bytes.size() - 3);
  EXPECT_THROW(ReadIndex(dir.File("cut.awei")), Error);
  std::string bad = bytes;
  bad[0] = 'X';
  std::ofstream(dir.File("bad.awei"), std::ios::binary) << bad;
  EXPECT_THROW(ReadIndex(dir.File("bad.awei")), Error);
}

TEST(GroundTruthTest, FileRoundTripAndDerivation) {
  TempDir dir;
  const std::vector<WordSegment> segs = {{"u1", "cat", "s", "L", 0, 5},
                                         {"u1", "dog", "s", "L", 5, 10},
                                         {"u2", "cat", "s", "L", 0, 6},
                                         {"u1", "cat", "s", "L", 10, 15}};
  const GroundTruth truth = GroundTruthFromSegments(segs);
  EXPECT_EQ(truth.at("u1"), (std::set<std::string>{"cat", "dog"}));
  EXPECT_EQ(truth.at("u2"), (std::set<std::string>{"cat"}));
  WriteGroundTruth(dir.File("t.tsv"), truth);
  EXPECT_EQ(LoadGroundTruth(dir.File("t.tsv")), truth);

  std::ofstream(dir.File("c.tsv")) << "# comment\nu1\tcat\n\nu3\tbird\n";
  const auto loaded = LoadGroundTruth(dir.File("c.tsv"));
  EXPECT_EQ(loaded.size(), 2u);
  EXPECT_TRUE(loaded.at("u3").count("bird"));
  std::ofstream(dir.File("bad.tsv")) << "u1 cat dog\n";
  EXPECT_THROW(LoadGroundTruth(dir.File("bad.tsv")), Error);

  const auto queries = GroupQueries(segs);
  ASSERT_EQ(queries.size(), 2u);
  EXPECT_EQ(queries[0].query_word, "cat");
  EXPECT_EQ(queries[0].instances.size(), 3u);
  EXPECT_EQ(queries[1].query_word, "dog");
}

}  // namespace
}  // namespace awe
