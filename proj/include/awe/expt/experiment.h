// include/awe/expt/experiment.h

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

#ifndef AWE_EXPT_EXPERIMENT_H_
#define AWE_EXPT_EXPERIMENT_H_

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "awe/base/config-file.h"
#include "awe/corpus/synthetic.h"
#include "awe/encoder/encoder.h"
#include "awe/qbe/qbe.h"
#include "awe/train/trainer.h"

namespace awe {

/// Labelled corpus with a per-language speaker split. Training uses the
/// train speakers of the training languages; evaluation, dev selection and
/// QbE search use the test speakers of their languages.
struct ExperimentCorpus {
  FeatureArchive archive;
  std::vector<WordSegment> segments;
  /// language id -> family name (may be empty for real corpora).
  std::map<std::string, std::string> family_of;
  std::vector<std::string> languages;
  /// language id -> held-out speaker ids.
  std::map<std::string, std::set<std::string>> test_speakers;

  bool IsTestSpeaker(const WordSegment &s) const;
  std::vector<WordSegment> TrainSegments(const std::string &language) const;
  std::vector<WordSegment> TestSegments(const std::string &language) const;
  bool SameFamily(const std::string &a, const std::string &b) const;
};

/// Holds out the last `n_test` speakers (sorted by id) of every language.
std::map<std::string, std::set<std::string>> SplitSpeakers(
    const std::vector<WordSegment> &segments, int n_test);

/// How runs on a pair subset are scheduled: the same number of epochs as a
/// full run, or as many epochs as keep the number of updates equal.
enum class SubsetSchedule { kEqualEpochs, kEqualUpdates };

struct ExperimentPlan {
  // Corpus: synthetic when `feats` is empty, otherwise AWEF + TSV paths.
  SyntheticFamilySpec synthetic;
  std::string feats;
  std::string align;
  std::string families;
  int test_speakers = 2;

  /// Languages of the cross-lingual matrix (default: all in the corpus).
  std::vector<std::string> languages;
  std::vector<std::string> eval_languages{"A0", "B0"};
  /// Preference order; a result uses the first one that is neither a
  /// training language of its model nor its eval language.
  std::vector<std::string> dev_languages{"B0", "A0", "B2", "A2"};

  bool run_matrix = true;
  bool matrix_diagonal = false;
  bool run_combinations = true;
  bool run_sequences = true;
  bool sequences_qbe = false;

  std::vector<std::vector<std::string>> combinations{{"A1", "A2"}, {"B1", "B2"}, {"A1", "B1"}};
  std::vector<std::vector<std::string>> subset_combinations{{"A1", "A2"}, {"B1", "B2"}};
  double subset_fraction = 0.1;
  SubsetSchedule subset_schedule = SubsetSchedule::kEqualUpdates;
  std::vector<std::vector<std::string>> sequences{{"A1", "A2", "B1", "B2"},
                                                  {"B1", "A1", "B2", "A2"},
                                                  {"B1", "B2", "A1", "A2"},
                                                  {"A1", "B1", "A2", "B2"}};
  std::uint64_t pair_budget = 2000;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};

  EncoderConfig encoder = DeskEncoder();
  TrainConfig train = DeskTraining();

  WindowConfig qbe_windows{8, 24, 4, 2};
  int qbe_query_words = 15;
  int qbe_max_instances = 5;

  int threads = 0;

  static EncoderConfig DeskEncoder();
  static TrainConfig DeskTraining();

  void Validate() const;
  static ExperimentPlan FromConfig(const ConfigFile &cfg);
  static ExperimentPlan Load(const std::string &path);
  std::string ToConfigText() const;
};

struct ResultRow {
  std::string experiment;  // matrix | combination | sequence
  std::string sequence;    // sequence label, empty otherwise
  int step = 0;            // 1-based position in the sequence
  std::string model_id;
  std::string train_set;   // training languages joined by '+'
  double subset_fraction = 1.0;
  std::string eval_language;
  std::string metric;      // ap | p_at_10
  double value = 0.0;
  std::uint64_t seed = 0;
  std::string dev_language;
  std::string checkpoint;
  std::string config_hash;
};

struct ResultTable {
  std::vector<ResultRow> rows;

  void Append(const ResultTable &other);
  /// Rows matching all non-empty filters.
  std::vector<const ResultRow *> Select(const std::string &experiment,
                                        const std::string &eval_language,
                                        const std::string &metric) const;
  void WriteCsv(const std::string &path) const;
  std::string ToCsv() const;
};

/// Mean matrix AP per (train, eval) cell with each column divided by its
/// largest off-diagonal cell. CSV: row,col,value,normalized_value.
void WriteHeatmap(const std::string &path, const ResultTable &table);
std::string HeatmapCsv(const ResultTable &table);

/// Executes experiments of a plan, training each distinct model once.
/// With a non-empty out_dir, per-run logs and checkpoints are written below
/// out_dir/runs.
class ExperimentRunner {
 public:
  explicit ExperimentRunner(ExperimentPlan plan, std::string out_dir = "");

  const ExperimentCorpus &corpus() const { return corpus_; }
  const ExperimentPlan &plan() const { return plan_; }

  ResultTable RunCrosslingualMatrix();
  ResultTable RunCombinationTable();
  ResultTable RunIncrementalSequences(bool with_qbe);
  /// Every experiment enabled in the plan.
  ResultTable RunAll();

  /// Number of models trained so far.
  std::size_t num_trained() const { return runs_.size(); }

  struct Request;  // one result cell; defined in the implementation

 private:
  struct RunKey {
    std::vector<std::string> languages;  // sorted
    double fraction = 1.0;
    std::uint64_t seed = 0;
    friend auto operator<=>(const RunKey &, const RunKey &) = default;
  };
  struct RunOutcome {
    std::string model_id;
    std::vector<std::string> dev_languages;
    std::vector<Checkpoint> best;
    std::vector<std::string> checkpoint_paths;
  };

  std::string DevLanguageFor(const std::vector<std::string> &train,
                             const std::string &eval) const;
  ResultTable Execute(const std::vector<Request> &requests);
  void TrainMissing(const std::map<RunKey, std::set<std::string>> &needed);
  RunOutcome TrainOne(const RunKey &key, const std::set<std::string> &dev_languages) const;
  std::string ModelId(const RunKey &key) const;
  std::string ConfigHash(const RunKey &key) const;

  ExperimentPlan plan_;
  std::string out_dir_;
  ExperimentCorpus corpus_;
  std::map<RunKey, RunOutcome> runs_;
};

ExperimentCorpus LoadExperimentCorpus(const ExperimentPlan &plan);

// Free-function forms of the three protocols.
ResultTable RunCrosslingualMatrix(const ExperimentPlan &plan, const std::string &out_dir = "");
ResultTable RunCombinationTable(const ExperimentPlan &plan, const std::string &out_dir = "");
ResultTable RunIncrementalSequences(const ExperimentPlan &plan, bool with_qbe,
                                    const std::string &out_dir = "");

}  // namespace awe

#endif  // AWE_EXPT_EXPERIMENT_H_
