// include/awe/encoder/checkpoint.h

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

#ifndef AWE_ENCODER_CHECKPOINT_H_
#define AWE_ENCODER_CHECKPOINT_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "awe/encoder/encoder.h"

namespace awe {

struct CheckpointMetadata {
  std::vector<std::string> training_languages;
  std::uint64_t seed = 0;
  int epoch = 0;
  double dev_score = 0.0;
  std::string dev_language;
  std::map<std::string, std::string> extra;
  friend bool operator==(const CheckpointMetadata &, const CheckpointMetadata &) = default;
};

struct Checkpoint {
  EncoderConfig config;
  EncoderParams params;
  CheckpointMetadata metadata;
};

// AWEC layout (little-endian):
//   "AWEC" | version u32 = 1 | metadata: u32 length + UTF-8 JSON |
//   tensor count u32 | per tensor: name (u32 length + bytes) | rank u32 |
//   dims u32 x rank | f32 payload, row-major
// The JSON holds the encoder config and the metadata fields.

inline constexpr std::uint32_t kCheckpointVersion = 1;

void SaveCheckpoint(const Checkpoint &ckpt, const std::string &path);
Checkpoint LoadCheckpoint(const std::string &path);

}  // namespace awe

#endif  // AWE_ENCODER_CHECKPOINT_H_
