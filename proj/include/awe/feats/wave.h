// include/awe/feats/wave.h

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

#ifndef AWE_FEATS_WAVE_H_
#define AWE_FEATS_WAVE_H_

#include <string>
#include <vector>

namespace awe {

/// Mono audio with samples scaled to [-1, 1].
struct Waveform {
  std::vector<float> samples;
  int sample_rate = 16000;

  double DurationMs() const {
    return 1000.0 * static_cast<double>(samples.size()) / sample_rate;
  }
};

/// True for the rates the front end accepts (8k, 16k, 22.05k, 44.1k, 48k).
bool IsSupportedSampleRate(int rate);

/// Reads a 16-bit PCM mono RIFF/WAVE file.
Waveform ReadWav(const std::string &path);
/// Writes 16-bit PCM mono; samples are clipped to [-1, 1].
void WriteWav(const std::string &path, const Waveform &wave);

}  // namespace awe

#endif  // AWE_FEATS_WAVE_H_
