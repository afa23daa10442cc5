// src/feats/mfcc.cc

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

#include "awe/feats/mfcc.h"

#include <cmath>
#include <mutex>

#include <fftw3.h>

namespace awe {

namespace {

// FFTW planning is not thread safe; execution on distinct arrays is.
std::mutex fftw_planner_mutex;

class RealFft {
 public:
  explicit RealFft(int n) : n_(n) {
    in_ = fftw_alloc_real(n);
    out_ = fftw_alloc_complex(n / 2 + 1);
    std::lock_guard<std::mutex> lock(fftw_planner_mutex);
    plan_ = fftw_plan_dft_r2c_1d(n, in_, out_, FFTW_ESTIMATE);
  }
  ~RealFft() {
    {
      std::lock_guard<std::mutex> lock(fftw_planner_mutex);
      fftw_destroy_plan(plan_);
    }
    fftw_free(in_);
    fftw_free(out_);
  }
  RealFft(const RealFft &) = delete;
  RealFft &operator=(const RealFft &) = delete;

  double *input() { return in_; }
  /// Power spectrum |X_k|^2 for k = 0 .. n/2.
  void PowerSpectrum(Eigen::VectorXd *power) {
    fftw_execute(plan_);
    power->resize(n_ / 2 + 1);
    for (int k = 0; k <= n_ / 2; ++k)
      (*power)(k) = out_[k][0] * out_[k][0] + out_[k][1] * out_[k][1];
  }

 private:
  int n_;
  double *in_;
  fftw_complex *out_;
  fftw_plan plan_;
};

// Orthonormal DCT-II rows 0 .. n_ceps-1.
Eigen::MatrixXd DctMatrix(int n_ceps, int n_mels) {
  Eigen::MatrixXd d(n_ceps, n_mels);
  for (int k = 0; k < n_ceps; ++k) {
    double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / n_mels);
    for (int n = 0; n < n_mels; ++n)
      d(k, n) = scale * std::cos(M_PI * k * (2.0 * n + 1.0) / (2.0 * n_mels));
  }
  return d;
}

void NormalizeColumns(Eigen::MatrixXd *x, double var_floor) {
  Eigen::RowVectorXd mean = x->colwise().mean();
  x->rowwise() -= mean;
  Eigen::RowVectorXd var = x->array().square().colwise().mean();
  for (int j = 0; j < x->cols(); ++j)
    x->col(j) /= std::sqrt(std::max(var(j), var_floor));
}

}  // namespace

void MfccConfig::Validate() const {
  if (!(window_ms > 0) || !(shift_ms > 0))
    throw Error("window_ms and shift_ms must be positive");
  if (window_ms < shift_ms) throw Error("window_ms must be >= shift_ms");
  if (n_mels < 1 || n_ceps < 1) throw Error("n_mels and n_ceps must be >= 1");
  if (n_ceps > n_mels) throw Error("n_ceps must not exceed n_mels");
  if (!(preemphasis >= 0.0 && preemphasis < 1.0))
    throw Error("preemphasis must be in [0, 1)");
  if (!(log_floor > 0)) throw Error("log_floor must be positive");
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

MelBanks::MelBanks(int n_mels, int sample_rate, int fft_size) {
  int n_bins = fft_size / 2 + 1;
  double mel_hi = HzToMel(sample_rate / 2.0);
  edges_mel_.resize(n_mels + 2);
  for (int i = 0; i < n_mels + 2; ++i) edges_mel_[i] = mel_hi * i / (n_mels + 1);

  weights_ = Eigen::MatrixXd::Zero(n_mels, n_bins);
  for (int m = 0; m < n_mels; ++m) {
    double left = edges_mel_[m], center = edges_mel_[m + 1],
           right = edges_mel_[m + 2];
    for (int k = 0; k < n_bins; ++k) {
      double mel = HzToMel(static_cast<double>(k) * sample_rate / fft_size);
      if (mel > left && mel <= center)
        weights_(m, k) = (mel - left) / (center - left);
      else if (mel > center && mel < right)
        weights_(m, k) = (right - mel) / (right - center);
    }
  }
}

FrameGeometry ComputeFrameGeometry(const MfccConfig &cfg, int sample_rate) {
  FrameGeometry g;
  g.window_length = static_cast<int>(std::lround(sample_rate * cfg.window_ms / 1000.0));
  g.frame_shift = static_cast<int>(std::lround(sample_rate * cfg.shift_ms / 1000.0));
  g.fft_size = 1;
  while (g.fft_size < g.window_length) g.fft_size <<= 1;
  return g;
}

int NumFrames(int num_samples, const FrameGeometry &geom) {
  if (num_samples < geom.window_length) return 0;
  return 1 + (num_samples - geom.window_length) / geom.frame_shift;
}

Eigen::MatrixXd ComputeMelEnergies(const Waveform &wave, const MfccConfig &cfg) {
  cfg.Validate();
  if (!IsSupportedSampleRate(wave.sample_rate))
    throw Error("unsupported sample rate " + std::to_string(wave.sample_rate));
  if (wave.samples.empty()) throw Error("empty waveform");
  FrameGeometry geom = ComputeFrameGeometry(cfg, wave.sample_rate);
  int num_frames = NumFrames(static_cast<int>(wave.samples.size()), geom);
  if (num_frames < 1) throw Error("utterance too short");

  const int n = geom.window_length;
  Eigen::VectorXd hamming(n);
  for (int i = 0; i < n; ++i)
    hamming(i) = n > 1 ? 0.54 - 0.46 * std::cos(2.0 * M_PI * i / (n - 1)) : 1.0;

  MelBanks banks(cfg.n_mels, wave.sample_rate, geom.fft_size);
  RealFft fft(geom.fft_size);
  double *buf = fft.input();
  Eigen::VectorXd power;
  Eigen::MatrixXd energies(num_frames, cfg.n_mels);
  std::vector<double> frame(n);

  for (int t = 0; t < num_frames; ++t) {
    const float *src = wave.samples.data() + static_cast<std::size_t>(t) * geom.frame_shift;
    for (int i = 0; i < n; ++i) frame[i] = src[i];
    // Pre-emphasis is applied inside the frame so every frame depends only on
    // its own samples.
    for (int i = n - 1; i > 0; --i) frame[i] -= cfg.preemphasis * frame[i - 1];
    frame[0] -= cfg.preemphasis * frame[0];
    for (int i = 0; i < n; ++i) buf[i] = frame[i] * hamming(i);
    for (int i = n; i < geom.fft_size; ++i) buf[i] = 0.0;
    fft.PowerSpectrum(&power);
    energies.row(t) = (banks.weights() * power).transpose();
  }
  return energies;
}

FeatureSequence ComputeMfcc(const Waveform &wave, const MfccConfig &cfg,
                            const std::string &utterance_id) {
  Eigen::MatrixXd energies = ComputeMelEnergies(wave, cfg);
  Eigen::MatrixXd log_mel = energies.array().max(cfg.log_floor).log().matrix();
  Eigen::MatrixXd dct = DctMatrix(cfg.n_ceps, cfg.n_mels);
  Eigen::MatrixXd ceps = log_mel * dct.transpose();

  FeatureSequence out;
  out.utterance_id = utterance_id;
  out.frame_shift_ms = static_cast<float>(cfg.shift_ms);
  if (cfg.cmvn) NormalizeColumns(&ceps, 1e-8);
  out.frames = ceps.cast<float>();
  return out;
}

void ApplyCmvn(FeatureMatrix *frames, double var_floor) {
  if (frames->rows() == 0) return;
  Eigen::MatrixXd x = frames->cast<double>();
  NormalizeColumns(&x, var_floor);
  *frames = x.cast<float>();
}

}  // namespace awe
