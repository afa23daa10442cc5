// tests/feats-test.cc

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

#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>

#include <gtest/gtest.h>

#include "awe/feats/feature-archive.h"
#include "awe/feats/mfcc.h"
#include "awe/feats/wave.h"
#include "test-util.h"

namespace awe {
namespace {

using awe::testing::TempDir;

Waveform Sine(double hz, double seconds, int rate = 16000) {
  Waveform w;
  w.sample_rate = rate;
  w.samples.resize(static_cast<std::size_t>(seconds * rate));
  for (std::size_t n = 0; n < w.samples.size(); ++n)
    w.samples[n] = static_cast<float>(0.5 * std::sin(2 * std::numbers::pi * hz * n / rate));
  return w;
}

Waveform Noise(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Waveform w;
  w.samples.resize(n);
  for (auto &s : w.samples) s = static_cast<float>(rng.Uniform(-0.5, 0.5));
  return w;
}

MfccConfig Raw() {
  MfccConfig cfg;
  cfg.cmvn = false;
  return cfg;
}

TEST(MfccTest, SilenceGivesConstantFrames) {
  Waveform w;
  w.samples.assign(16000, 0.0f);
  FeatureSequence f = ComputeMfcc(w, Raw(), "sil");
  ASSERT_EQ(f.NumFrames(), 98);  // 1 + (16000 - 400) / 160
  ASSERT_EQ(f.frames.cols(), 13);
  EXPECT_EQ(f.utterance_id, "sil");
  for (int t = 1; t < f.NumFrames(); ++t)
    for (int c = 0; c < 13; ++c) EXPECT_NEAR(f.frames(t, c), f.frames(0, c), 1e-9);
  EXPECT_TRUE(f.frames.allFinite());
}

TEST(MfccTest, FrameCountFormula) {
  const FrameGeometry g = ComputeFrameGeometry(MfccConfig{}, 16000);
  EXPECT_EQ(g.frame_shift, 160);
  EXPECT_EQ(g.fft_size, 512);
  EXPECT_EQ(NumFrames(399, g), 0);
  EXPECT_EQ(NumFrames(400, g), 1);
  EXPECT_EQ(NumFrames(559, g), 1);
  EXPECT_EQ(NumFrames(560, g), 2);
}

TEST(MfccTest, GainOnlyMovesC0) {
  const Waveform w = Noise(8000, 11);
  Waveform half = w;
  for (auto &s : half.samples) s *= 0.5f;
  const auto a = ComputeMfcc(w, Raw()).frames;
  const auto b = ComputeMfcc(half, Raw()).frames;
  ASSERT_EQ(a.rows(), b.rows());
  // Power scales by 1/4, so each log-mel energy moves by log(1/4); the
  // orthonormal DCT maps that constant onto c0 alone, scaled by sqrt(n_mels).
  const double expected_c0_shift = std::sqrt(26.0) * std::log(0.25);
  for (int t = 0; t < a.rows(); ++t) {
    for (int c = 1; c < 13; ++c) EXPECT_NEAR(a(t, c), b(t, c), 1e-6) << t << "," << c;
    EXPECT_NEAR(b(t, 0) - a(t, 0), expected_c0_shift, 1e-4);
  }
}

TEST(MfccTest, SineEnergyPeaksInTheFilterAround440Hz) {
  const Waveform w = Sine(440.0, 1.0);
  FeatureSequence f = ComputeMfcc(w, MfccConfig{});
  EXPECT_EQ(f.NumFrames(), 98);
  EXPECT_TRUE(f.frames.allFinite());

  // Independent filterbank geometry: 26 triangles with centres equally
  // spaced in mel between 0 Hz and Nyquist.
  auto mel = [](double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); };
  const double step = mel(8000.0) / 27.0;
  int expected = -1;
  double best = 1e9;
  for (int m = 0; m < 26; ++m) {
    const double lo = m * step, centre = (m + 1) * step, hi = (m + 2) * step;
    const double x = mel(440.0);
    if (x <= lo || x >= hi) continue;
    const double weight = x < centre ? (x - lo) / step : (hi - x) / step;
    if (-weight < best) {
      best = -weight;
      expected = m;
    }
  }
  ASSERT_GE(expected, 0);

  const Eigen::MatrixXd energies = ComputeMelEnergies(w, MfccConfig{});
  ASSERT_EQ(energies.cols(), 26);
  const Eigen::VectorXd mean = energies.colwise().mean();
  Eigen::Index argmax;
  mean.maxCoeff(&argmax);
  EXPECT_EQ(argmax, expected);
}

TEST(MfccTest, MelScaleRoundTrip) {
  for (double hz : {0.0, 100.0, 440.0, 1000.0, 7999.0})
    EXPECT_NEAR(MelToHz(HzToMel(hz)), hz, 1e-9);
  EXPECT_NEAR(HzToMel(700.0), 2595.0 * std::log10(2.0), 1e-12);
}

TEST(MfccTest, FilterbankEdges) {
  MelBanks banks(26, 16000, 512);
  EXPECT_EQ(banks.weights().rows(), 26);
  EXPECT_EQ(banks.weights().cols(), 257);
  EXPECT_DOUBLE_EQ(banks.EdgeMel(0), 0.0);
  EXPECT_NEAR(banks.EdgeMel(27), HzToMel(8000.0), 1e-9);
  EXPECT_GE(banks.weights().minCoeff(), 0.0);
  EXPECT_LE(banks.weights().maxCoeff(), 1.0);
}

TEST(MfccTest, TimeShiftAlignsFrames) {
  const Waveform w = Noise(6000, 5);
  Waveform shifted;
  shifted.samples = Noise(160, 99).samples;
  shifted.samples.insert(shifted.samples.end(), w.samples.begin(), w.samples.end());
  const auto a = ComputeMfcc(w, Raw()).frames;
  const auto b = ComputeMfcc(shifted, Raw()).frames;
  ASSERT_EQ(b.rows(), a.rows() + 1);
  for (int t = 0; t < a.rows(); ++t)
    for (int c = 0; c < 13; ++c) EXPECT_NEAR(b(t + 1, c), a(t, c), 1e-5);
}

TEST(MfccTest, CmvnNormalizesEachCoefficient) {
  FeatureSequence f = ComputeMfcc(Noise(16000, 3), MfccConfig{});
  for (int c = 0; c < 13; ++c) {
    const Eigen::VectorXd col = f.frames.col(c).cast<double>();
    const double mean = col.mean();
    const double var = (col.array() - mean).square().mean();
    EXPECT_NEAR(mean, 0.0, 1e-5);
    EXPECT_NEAR(var, 1.0, 1e-4);
  }
}

TEST(MfccTest, PureFunction) {
  const Waveform w = Noise(5000, 8);
  const auto a = ComputeMfcc(w, MfccConfig{}).frames;
  const auto b = ComputeMfcc(w, MfccConfig{}).frames;
  EXPECT_EQ(0, std::memcmp(a.data(), b.data(), sizeof(float) * a.size()));
}

TEST(MfccTest, RejectsBadInput) {
  Waveform tiny;
  tiny.samples.assign(100, 0.1f);
  EXPECT_THROW(ComputeMfcc(tiny, MfccConfig{}), Error);
  Waveform odd = Noise(4000, 1);
  odd.sample_rate = 12345;
  EXPECT_THROW(ComputeMfcc(odd, MfccConfig{}), Error);
  MfccConfig bad;
  bad.n_ceps = 30;
  EXPECT_THROW(bad.Validate(), Error);
  bad = MfccConfig{};
  bad.preemphasis = 1.0;
  EXPECT_THROW(bad.Validate(), Error);
  bad = MfccConfig{};
  bad.window_ms = 5;
  EXPECT_THROW(bad.Validate(), Error);
}

TEST(WaveTest, RoundTripIs16BitExact) {
  TempDir dir;
  Waveform w = Noise(1234, 2);
  w.sample_rate = 8000;
  WriteWav(dir.File("a.wav"), w);
  const Waveform r = ReadWav(dir.File("a.wav"));
  EXPECT_EQ(r.sample_rate, 8000);
  ASSERT_EQ(r.samples.size(), w.samples.size());
  for (std::size_t i = 0; i < w.samples.size(); ++i)
    EXPECT_NEAR(r.samples[i], w.samples[i], 1.0 / 32767);
  // A second pass through the 16-bit representation is lossless.
  WriteWav(dir.File("b.wav"), r);
  EXPECT_EQ(ReadWav(dir.File("b.wav")).samples, r.samples);
}

TEST(WaveTest, RejectsGarbage) {
  TempDir dir;
  std::ofstream(dir.File("x.wav")) << "definitely not RIFF";
  EXPECT_THROW(ReadWav(dir.File("x.wav")), Error);
  EXPECT_THROW(ReadWav(dir.File("missing.wav")), Error);
}

TEST(FeatureArchiveTest, RoundTripIsBitExact) {
  TempDir dir;
  Rng rng(4);
  std::vector<FeatureSequence> feats(2);
  feats[0].utterance_id = "u1";
  feats[0].frames = awe::testing::RandomFeatures(3, 13, &rng);
  feats[1].utterance_id = "u2";
  feats[1].frames = awe::testing::RandomFeatures(7, 13, &rng);
  feats[1].frames(0, 0) = -0.0f;
  feats[1].frames(1, 1) = 1e-38f;
  WriteFeatureArchive(feats, dir.File("f.awef"));
  const auto back = ReadFeatureArchive(dir.File("f.awef"));
  ASSERT_EQ(back.size(), 2u);
  for (int i = 0; i < 2; ++i) {
    EXPECT_EQ(back[i].utterance_id, feats[i].utterance_id);
    ASSERT_EQ(back[i].frames.rows(), feats[i].frames.rows());
    EXPECT_EQ(0, std::memcmp(back[i].frames.data(), feats[i].frames.data(),
                             sizeof(float) * feats[i].frames.size()));
  }
  // Header: magic, version 1, count 2.
  const std::string bytes = awe::testing::ReadBytes(dir.File("f.awef"));
  EXPECT_EQ(bytes.substr(0, 4), "AWEF");
  EXPECT_EQ(bytes[4], 1);
  EXPECT_EQ(bytes[8], 2);
}

TEST(FeatureArchiveTest, EmptyArchive) {
  TempDir dir;
  WriteFeatureArchive({}, dir.File("e.awef"));
  EXPECT_TRUE(ReadFeatureArchive(dir.File("e.awef")).empty());
}

TEST(FeatureArchiveTest, RejectsDuplicatesAndCorruption) {
  TempDir dir;
  std::vector<FeatureSequence> feats(2);
  feats[0].utterance_id = feats[1].utterance_id = "dup";
  feats[0].frames = feats[1].frames = FeatureMatrix::Zero(2, 13);
  EXPECT_THROW(WriteFeatureArchive(feats, dir.File("d.awef")), Error);

  feats[1].utterance_id = "other";
  WriteFeatureArchive(feats, dir.File("ok.awef"));
  std::string bytes = awe::testing::ReadBytes(dir.File("ok.awef"));

  std::ofstream(dir.File("short.awef"), std::ios::binary) << bytes.substr(0, bytes.size() - 3);
  EXPECT_THROW(ReadFeatureArchive(dir.File("short.awef")), Error);

  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  std::ofstream(dir.File("magic.awef"), std::ios::binary) << bad_magic;
  EXPECT_THROW(ReadFeatureArchive(dir.File("magic.awef")), Error);

  std::string bad_version = bytes;
  bad_version[4] = 9;
  std::ofstream(dir.File("version.awef"), std::ios::binary) << bad_version;
  EXPECT_THROW(ReadFeatureArchive(dir.File("version.awef")), Error);
}

TEST(FeatureArchiveTest, LookupAndMerge) {
  std::vector<FeatureSequence> a(1), b(1);
  a[0].utterance_id = "x";
  a[0].frames = FeatureMatrix::Ones(2, 13);
  b[0].utterance_id = "y";
  b[0].frames = FeatureMatrix::Zero(3, 13);
  FeatureArchive archive(a);
  archive.Merge(FeatureArchive(b));
  EXPECT_EQ(archive.size(), 2u);
  EXPECT_EQ(archive.At("y").NumFrames(), 3);
  EXPECT_EQ(archive.Find("z"), nullptr);
  EXPECT_THROW(archive.At("z"), Error);
  EXPECT_THROW(archive.Merge(FeatureArchive(a)), Error);
}

}  // namespace
}  // namespace awe
