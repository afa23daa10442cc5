// include/awe/corpus/synthetic.h

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

#ifndef AWE_CORPUS_SYNTHETIC_H_
#define AWE_CORPUS_SYNTHETIC_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "awe/base/config-file.h"
#include "awe/corpus/word-segment.h"
#include "awe/feats/mfcc.h"

namespace awe {

struct IntRange {
  int lo = 1;
  int hi = 1;
  friend bool operator==(const IntRange &, const IntRange &) = default;
};

/// Parameters of a synthetic multi-family corpus. Languages in a family share
/// part of their phone inventory; speakers add a constant offset per frame.
struct SyntheticFamilySpec {
  std::uint32_t n_families = 2;
  std::uint32_t languages_per_family = 3;
  std::uint32_t phones_per_language = 20;
  double shared_fraction_within_family = 0.8;
  double shared_fraction_across_family = 0.0;
  std::uint32_t n_word_types = 50;
  IntRange phones_per_word{4, 6};
  std::uint32_t n_speakers = 8;
  std::uint32_t instances_per_type = 20;
  double speaker_shift_scale = 2.0;
  double noise_scale = 1.0;
  IntRange frames_per_phone{2, 4};
  std::uint64_t seed = 0;
  // Rendering details beyond the inventory model.
  std::uint32_t feature_dim = 13;
  IntRange words_per_utterance{3, 6};
  IntRange pause_frames{1, 3};
  /// Speaker shifts lie in a random subspace of this rank shared by all
  /// languages; 0 draws them from the full feature space.
  std::uint32_t speaker_subspace_dim = 2;

  void Validate() const;
  /// Canonical key = value text; also the fingerprint input.
  std::string ToConfigText() const;
  static SyntheticFamilySpec FromConfig(const ConfigFile &cfg,
                                        const std::string &prefix = "");
};

/// Name of language `index` within family `family` ("A0", "B2", ...).
std::string SyntheticLanguageName(std::uint32_t family, std::uint32_t index);
std::string SyntheticFamilyName(std::uint32_t family);

struct SyntheticCorpus {
  std::vector<FeatureSequence> features;
  std::vector<WordSegment> segments;
  /// language id -> family name.
  std::map<std::string, std::string> family_of;
  /// language id -> phones_per_language x feature_dim prototype matrix.
  std::map<std::string, Eigen::MatrixXd> inventories;
  /// language id -> speaker ids in generation order.
  std::map<std::string, std::vector<std::string>> speakers;
  /// All language ids in generation order.
  std::vector<std::string> languages;
};

/// Deterministic given spec.seed; each utterance renders from its own stream.
SyntheticCorpus GenerateSyntheticCorpus(const SyntheticFamilySpec &spec);

/// Renders a phone sequence with the given per-phone durations. Each frame is
/// prototype + speaker_shift + noise_scale * N(0, I).
FeatureMatrix RenderPhones(const Eigen::MatrixXd &inventory,
                           const std::vector<int> &phones,
                           const std::vector<int> &durations,
                           const Eigen::VectorXd &speaker_shift, double noise_scale,
                           Rng *rng);

// Family map TSV: language_id <tab> family.
void WriteFamilyMap(const std::string &path,
                    const std::map<std::string, std::string> &family_of);
std::map<std::string, std::string> ReadFamilyMap(const std::string &path);

}  // namespace awe

#endif  // AWE_CORPUS_SYNTHETIC_H_
