// include/awe/train/trainer.h

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

#ifndef AWE_TRAIN_TRAINER_H_
#define AWE_TRAIN_TRAINER_H_

#include <cstdint>
#include <string>
#include <vector>

#include "awe/base/config-file.h"
#include "awe/corpus/pairs.h"
#include "awe/encoder/checkpoint.h"
#include "awe/train/adam.h"
#include "awe/train/batches.h"

namespace awe {

struct TrainConfig {
  double tau = 0.1;
  int k_negatives = 20;
  int batch_pairs = 100;
  AdamConfig adam;
  int epochs = 25;
  std::uint64_t seed = 0;
  NegativePolicy negative_policy = NegativePolicy::kInBatch;
  /// Dev AP is computed on at most this many segments per dev language.
  int dev_max_segments = 1000;

  void Validate() const;
  BatchConfig Batching() const { return {k_negatives, batch_pairs, negative_policy}; }
  /// Reads keys under `prefix` (e.g. "train."), keeping defaults for absent ones.
  static TrainConfig FromConfig(const ConfigFile &cfg, const std::string &prefix = "");
  std::string ToConfigText(const std::string &prefix = "") const;
};

EncoderConfig EncoderConfigFromConfig(const ConfigFile &cfg, const std::string &prefix = "",
                                      EncoderConfig defaults = {});
std::string EncoderConfigText(const EncoderConfig &cfg, const std::string &prefix = "");

/// Held-out language used for model selection.
struct DevSet {
  std::string language;
  const FeatureArchive *archive = nullptr;
  std::vector<WordSegment> segments;
};

/// Deterministic subsample of at most `max_segments` segments.
DevSet MakeDevSet(const std::string &language, const FeatureArchive *archive,
                  std::vector<WordSegment> segments, int max_segments, std::uint64_t seed);

/// Labelled training material, possibly pooled over several languages.
struct TrainingData {
  const FeatureArchive *archive = nullptr;
  /// Every training segment; the pool for corpus-sampled negatives.
  std::vector<WordSegment> segments;
  std::vector<PositivePair> pairs;

  std::vector<std::string> Languages() const;
};

struct EpochLog {
  int epoch = 0;
  double mean_loss = 0.0;
  std::vector<double> dev_ap;  // one per dev set, in DevSet order
};

struct TrainResult {
  std::vector<EpochLog> log;
  /// Best checkpoint per dev set, in DevSet order.
  std::vector<Checkpoint> best;
  std::vector<int> best_epoch;
};

/// Index of the entry with the largest score; the earliest wins ties.
std::size_t SelectBestEpoch(const std::vector<double> &dev_scores);

/// Trains one model on the pooled pairs and keeps, for every dev set, the
/// snapshot with the highest dev AP. No dev language may be a training
/// language.
TrainResult TrainMultiDev(const TrainingData &data, const std::vector<DevSet> &dev_sets,
                          const EncoderConfig &enc_cfg, const TrainConfig &cfg);

/// Single dev language; result.best[0] is the selected checkpoint.
inline TrainResult TrainModel(const TrainingData &data, const DevSet &dev,
                              const EncoderConfig &enc_cfg, const TrainConfig &cfg) {
  return TrainMultiDev(data, {dev}, enc_cfg, cfg);
}

/// Mean loss of one optimizer step over a batch; updates params and state.
double TrainStep(const std::vector<TrainingExample> &batch,
                 const std::vector<FeatureMatrix> &features, const EncoderConfig &enc_cfg,
                 const TrainConfig &cfg, EncoderParams *params, AdamState *state);

/// CSV "epoch,mean_loss,dev_ap" for one dev set, else one dev_ap_<lang>
/// column per dev set.
void WriteEpochLog(const std::string &path, const std::vector<EpochLog> &log,
                   const std::vector<std::string> &dev_languages);

}  // namespace awe

#endif  // AWE_TRAIN_TRAINER_H_
