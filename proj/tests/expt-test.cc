// tests/expt-test.cc

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

#include <filesystem>
#include <set>

#include <gtest/gtest.h>

#include "awe/encoder/checkpoint.h"
#include "awe/expt/experiment.h"
#include "test-util.h"

namespace awe {
namespace {

using awe::testing::TempDir;

// A plan small enough to train a handful of models in seconds.
ExperimentPlan TinyPlan() {
  ExperimentPlan plan;
  plan.synthetic.n_families = 2;
  plan.synthetic.languages_per_family = 3;
  plan.synthetic.n_word_types = 12;
  plan.synthetic.n_speakers = 5;
  plan.synthetic.instances_per_type = 6;
  plan.test_speakers = 2;
  plan.encoder.hidden_dim = 16;
  plan.encoder.embed_dim = 8;
  plan.encoder.n_layers = 1;
  plan.train.epochs = 2;
  plan.train.k_negatives = 5;
  plan.train.batch_pairs = 32;
  plan.pair_budget = 100;
  plan.seeds = {0};
  plan.combinations = {{"A1", "A2"}};
  plan.subset_combinations = {{"A1", "A2"}};
  plan.subset_fraction = 0.5;
  plan.sequences = {{"B1", "A1", "A2"}};
  plan.qbe_query_words = 3;
  plan.qbe_max_instances = 2;
  return plan;
}

TEST(SplitTest, HoldsOutLastSortedSpeakers) {
  std::vector<WordSegment> segs;
  for (const char *spk : {"s3", "s1", "s2", "s10"}) segs.push_back({"u", "w", spk, "X", 0, 5});
  segs.push_back({"v", "w", "t1", "Y", 0, 5});
  segs.push_back({"v", "w", "t0", "Y", 0, 5});
  const auto split = SplitSpeakers(segs, 1);
  EXPECT_EQ(split.at("X"), (std::set<std::string>{"s3"}));
  EXPECT_EQ(split.at("Y"), (std::set<std::string>{"t1"}));
  EXPECT_THROW(SplitSpeakers(segs, 2), Error);
  EXPECT_THROW(SplitSpeakers(segs, 0), Error);
}

TEST(PlanTest, ConfigRoundTripAndValidation) {
  ExperimentPlan plan = TinyPlan();
  plan.languages = {"A0", "B0"};
  plan.subset_schedule = SubsetSchedule::kEqualEpochs;
  plan.seeds = {3, 7};
  plan.qbe_windows = {10, 30, 5, 3};
  const std::string text = plan.ToConfigText();
  ConfigFile cfg = ConfigFile::Parse(text, "plan");
  EXPECT_EQ(ExperimentPlan::FromConfig(cfg).ToConfigText(), text);

  ConfigFile typo = ConfigFile::Parse("[plan]\nsubset_fractoin = 0.2\n", "plan");
  EXPECT_THROW(ExperimentPlan::FromConfig(typo), Error);

  ExperimentPlan bad = TinyPlan();
  bad.subset_fraction = 0;
  EXPECT_THROW(bad.Validate(), Error);
  bad = TinyPlan();
  bad.combinations = {{"A1", "A1"}};
  EXPECT_THROW(bad.Validate(), Error);
  bad = TinyPlan();
  bad.seeds.clear();
  EXPECT_THROW(bad.Validate(), Error);
  bad = TinyPlan();
  bad.combinations = {{"A1", "Z9"}};
  EXPECT_THROW(ExperimentRunner{bad}, Error);

  // Experiments that are switched off are not checked against the corpus.
  ExperimentPlan off = TinyPlan();
  off.sequences = {{"Z9", "A1"}};
  off.run_sequences = false;
  EXPECT_NO_THROW(ExperimentRunner{off});
  off.run_sequences = true;
  EXPECT_THROW(ExperimentRunner{off}, Error);
}

TEST(RunnerTest, CorpusSplitKeepsSpeakersApart) {
  ExperimentRunner runner(TinyPlan());
  const auto &c = runner.corpus();
  EXPECT_EQ(c.languages, (std::vector<std::string>{"A0", "A1", "A2", "B0", "B1", "B2"}));
  EXPECT_TRUE(c.SameFamily("A0", "A2"));
  EXPECT_FALSE(c.SameFamily("A0", "B2"));
  for (const auto &l : c.languages) {
    std::set<std::string> train, test;
    for (const auto &s : c.TrainSegments(l)) train.insert(s.speaker_id);
    for (const auto &s : c.TestSegments(l)) test.insert(s.speaker_id);
    EXPECT_EQ(train.size(), 3u);
    EXPECT_EQ(test.size(), 2u);
    for (const auto &s : test) EXPECT_FALSE(train.count(s));
  }
}

TEST(RunnerTest, TwoLanguageMatrixHasTwoPositiveCells) {
  ExperimentPlan plan = TinyPlan();
  plan.languages = {"A0", "A1"};
  plan.eval_languages = {"A0", "A1"};
  plan.dev_languages = {"A2"};
  const ResultTable t = RunCrosslingualMatrix(plan);
  ASSERT_EQ(t.rows.size(), 2u);
  std::set<std::pair<std::string, std::string>> cells;
  for (const auto &r : t.rows) {
    EXPECT_EQ(r.metric, "ap");
    EXPECT_GT(r.value, 0.0);
    EXPECT_LE(r.value, 1.0);
    EXPECT_NE(r.train_set, r.eval_language);
    EXPECT_EQ(r.dev_language, "A2");
    cells.insert({r.train_set, r.eval_language});
  }
  EXPECT_EQ(cells.size(), 2u);

  plan.languages = {"A0"};
  EXPECT_THROW(RunCrosslingualMatrix(plan), Error);
}

TEST(RunnerTest, SequenceRowsPerStepAndMetric) {
  ExperimentPlan plan = TinyPlan();
  const ResultTable t = RunIncrementalSequences(plan, true);
  for (const std::string eval : {"A0", "B0"})
    for (const std::string metric : {"ap", "p_at_10"}) {
      const auto rows = t.Select("sequence", eval, metric);
      ASSERT_EQ(rows.size(), 3u) << eval << " " << metric;
      for (int k = 0; k < 3; ++k) {
        EXPECT_EQ(rows[k]->step, k + 1);
        EXPECT_EQ(rows[k]->sequence, "B1>A1>A2");
        EXPECT_GE(rows[k]->value, 0.0);
        EXPECT_LE(rows[k]->value, 1.0);
      }
      EXPECT_EQ(rows[2]->train_set, "A1+A2+B1");
    }

  plan.sequences = {{}};
  EXPECT_THROW(RunIncrementalSequences(plan, false), Error);
  plan.sequences = {{"A1", "A0"}};
  EXPECT_THROW(RunIncrementalSequences(plan, false), Error);
}

TEST(RunnerTest, FullFractionSubsetIsTheFullModel) {
  ExperimentPlan plan = TinyPlan();
  plan.subset_fraction = 1.0;
  ExperimentRunner runner(plan);
  const ResultTable t = runner.RunCombinationTable();
  const auto rows = t.Select("combination", "A0", "ap");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0]->value, rows[1]->value);
  EXPECT_EQ(rows[0]->model_id, rows[1]->model_id);
  EXPECT_EQ(runner.num_trained(), 1u);
}

TEST(RunnerTest, SameSeedReproducesTableAndCheckpoints) {
  TempDir a, b;
  ExperimentPlan plan = TinyPlan();
  plan.run_sequences = false;
  plan.languages = {"A0", "A1", "B0"};
  plan.eval_languages = {"A0"};
  plan.dev_languages = {"B0", "A2"};
  const ResultTable ta = ExperimentRunner(plan, a.path().string()).RunAll();
  plan.threads = 3;
  const ResultTable tb = ExperimentRunner(plan, b.path().string()).RunAll();
  EXPECT_EQ(ta.ToCsv(), tb.ToCsv());

  std::size_t compared = 0;
  for (const auto &r : ta.rows) {
    ASSERT_FALSE(r.checkpoint.empty());
    EXPECT_EQ(r.config_hash.size(), 16u);
    const auto pa = a.path() / r.checkpoint, pb = b.path() / r.checkpoint;
    ASSERT_TRUE(std::filesystem::exists(pa)) << pa;
    EXPECT_EQ(awe::testing::ReadBytes(pa.string()), awe::testing::ReadBytes(pb.string()));
    const Checkpoint ck = LoadCheckpoint(pa.string());
    // The checkpoint behind every row never saw its eval language.
    for (const auto &l : ck.metadata.training_languages) {
      EXPECT_NE(l, r.eval_language);
      EXPECT_NE(l, ck.metadata.dev_language);
    }
    EXPECT_EQ(ck.metadata.dev_language, r.dev_language);
    EXPECT_NE(r.dev_language, r.eval_language);
    ++compared;
  }
  EXPECT_GT(compared, 0u);

  plan.seeds = {1};
  EXPECT_NE(ExperimentRunner(plan).RunAll().ToCsv(), ta.ToCsv());
}

TEST(ResultTableTest, CsvSelectAndHeatmap) {
  ResultTable t;
  auto row = [](std::string train, std::string eval, double v, std::uint64_t seed) {
    ResultRow r;
    r.experiment = "matrix";
    r.model_id = train + "_s" + std::to_string(seed);
    r.train_set = train;
    r.eval_language = eval;
    r.metric = "ap";
    r.value = v;
    r.seed = seed;
    return r;
  };
  t.rows = {row("A1", "A0", 0.4, 0), row("A1", "A0", 0.6, 1), row("B1", "A0", 0.25, 0),
            row("B1", "A0", 0.25, 1), row("A0", "A0", 0.9, 0)};
  EXPECT_EQ(HeatmapCsv(t),
            "row,col,value,normalized_value\n"
            "A0,A0,0.900000,1.800000\n"
            "A1,A0,0.500000,1.000000\n"
            "B1,A0,0.250000,0.500000\n");
  EXPECT_EQ(t.Select("matrix", "A0", "ap").size(), 5u);
  EXPECT_EQ(t.Select("", "", "p_at_10").size(), 0u);
  const std::string csv = t.ToCsv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "experiment,sequence,step,model_id,train_set,subset_fraction,eval_language,metric,"
            "value,seed,dev_language,checkpoint,config_hash");
  EXPECT_NE(csv.find("matrix,,0,A1_s1,A1,1,A0,ap,0.600000,1,,,\n"), std::string::npos) << csv;
}

}  // namespace
}  // namespace awe
