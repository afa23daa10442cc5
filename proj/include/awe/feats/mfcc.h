// include/awe/feats/mfcc.h

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

#ifndef AWE_FEATS_MFCC_H_
#define AWE_FEATS_MFCC_H_

#include <string>

#include <Eigen/Dense>

#include "awe/base/common.h"
#include "awe/feats/wave.h"

namespace awe {

/// Sequence of acoustic feature frames for one utterance.
struct FeatureSequence {
  std::string utterance_id;
  FeatureMatrix frames;  // T x D
  float frame_shift_ms = 10.0f;

  int NumFrames() const { return static_cast<int>(frames.rows()); }
  int Dim() const { return static_cast<int>(frames.cols()); }
};

struct MfccConfig {
  double window_ms = 25.0;
  double shift_ms = 10.0;
  int n_mels = 26;
  int n_ceps = 13;
  double preemphasis = 0.97;
  double log_floor = 1e-10;
  bool cmvn = true;

  /// Throws awe::Error if the fields are inconsistent.
  void Validate() const;
};

double HzToMel(double hz);
double MelToHz(double mel);

/// Triangular filters spaced uniformly on the mel scale between 0 Hz and
/// Nyquist, sampled at the FFT bin frequencies.
class MelBanks {
 public:
  MelBanks(int n_mels, int sample_rate, int fft_size);

  /// n_mels x (fft_size / 2 + 1) weight matrix.
  const Eigen::MatrixXd &weights() const { return weights_; }
  /// Mel-scale edge points; filter m spans [edge(m), edge(m + 2)].
  double EdgeMel(int i) const { return edges_mel_[i]; }
  double CenterHz(int m) const { return MelToHz(edges_mel_[m + 1]); }
  int NumBins() const { return static_cast<int>(weights_.rows()); }

 private:
  Eigen::MatrixXd weights_;
  std::vector<double> edges_mel_;
};

/// Frame geometry for a waveform at a given rate.
struct FrameGeometry {
  int window_length;  // samples
  int frame_shift;    // samples
  int fft_size;       // next power of two >= window_length
};
FrameGeometry ComputeFrameGeometry(const MfccConfig &cfg, int sample_rate);

/// Number of full frames: 1 + floor((n - window) / shift), or 0 if too short.
int NumFrames(int num_samples, const FrameGeometry &geom);

/// Linear mel filterbank energies, T x n_mels (before the log and the DCT).
Eigen::MatrixXd ComputeMelEnergies(const Waveform &wave, const MfccConfig &cfg);

/// Static MFCCs (T x n_ceps). Pure and deterministic.
FeatureSequence ComputeMfcc(const Waveform &wave, const MfccConfig &cfg,
                            const std::string &utterance_id = "");

/// Per-utterance mean/variance normalization of each column in place.
void ApplyCmvn(FeatureMatrix *frames, double var_floor = 1e-8);

}  // namespace awe

#endif  // AWE_FEATS_MFCC_H_
