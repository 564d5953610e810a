// Copyright (c) 2026 ctxtts Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <vector>

#include "gtest/gtest.h"

#include "ctxtts/audio/features.h"
#include "ctxtts/audio/wav.h"
#include "ctxtts/common/error.h"
#include "ctxtts/common/rng.h"
#include "ctxtts/nn/ops.h"
#include "gradcheck.h"

namespace ctxtts::audio {
namespace {

std::vector<double> Sine(double hz, double amp, int samples, int sr = 16000) {
  std::vector<double> x(samples);
  for (int i = 0; i < samples; ++i) x[i] = amp * std::sin(2.0 * M_PI * hz * i / sr);
  return x;
}

TEST(MelTest, SilenceGivesFloor) {
  MelExtractor mel{FeatureConfig{}};
  std::vector<double> x(16000, 0.0);
  MelSpectrogram m = mel.Compute(x);
  EXPECT_EQ(m.num_frames(), 100);
  EXPECT_EQ(m.frames.cols(), 80);
  const double floor = std::log(1e-5);
  EXPECT_LT((m.frames.array() - floor).abs().maxCoeff(), 1e-12);
}

TEST(MelTest, FrameCountLaw) {
  MelExtractor mel{FeatureConfig{}};
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = rng.UniformInt(1, 5000);
    std::vector<double> x(n);
    for (double& s : x) s = rng.Normal() * 0.1;
    EXPECT_EQ(mel.Compute(x).num_frames(), (n + 159) / 160) << n;
  }
}

TEST(MelTest, EveryFilterSeesSpectrum) {
  MelExtractor mel{FeatureConfig{}};
  for (int m = 0; m < 80; ++m) EXPECT_GT(mel.mel_basis().col(m).sum(), 0.0) << m;
}

TEST(MelTest, SinePeaksNearItsFrequency) {
  FeatureConfig cfg;
  MelExtractor mel{cfg};
  MelSpectrogram low = mel.Compute(Sine(300, 0.5, 8000));
  MelSpectrogram high = mel.Compute(Sine(3000, 0.5, 8000));
  Eigen::Index a, b;
  low.frames.row(20).maxCoeff(&a);
  high.frames.row(20).maxCoeff(&b);
  EXPECT_LT(a, b);
}

TEST(MelTest, RejectsBadInput) {
  MelExtractor mel{FeatureConfig{}};
  std::vector<double> empty;
  EXPECT_THROW(mel.Compute(empty), Error);
  std::vector<double> nan(100, std::nan(""));
  EXPECT_THROW(mel.Compute(nan), Error);
}

TEST(MelTest, DifferentiableMatchesDirect) {
  MelExtractor mel{FeatureConfig{}};
  Rng rng(5);
  std::vector<double> x(1234);
  for (double& s : x) s = rng.Normal() * 0.2;
  nn::Matrix w = Eigen::Map<nn::Matrix>(x.data(), x.size(), 1);
  nn::Tensor t = mel.ComputeDifferentiable(nn::Tensor(w));
  EXPECT_LT((t.value() - mel.Compute(x).frames).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(MelTest, DifferentiableGradient) {
  FeatureConfig cfg;
  cfg.num_mels = 20;
  MelExtractor mel{cfg};
  Rng rng(6);
  nn::Matrix w(500, 1);
  for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, 0) = rng.Normal() * 0.3;
  nn::Tensor wav(w, true);
  auto loss = [&] { return nn::Mean(mel.ComputeDifferentiable(wav)); };
  auto result = testing::CheckGradient(loss, wav, 40, rng);
  EXPECT_LT(result.max_rel_error, 1e-5);
}

TEST(AuxTest, SinePitchAndVoicing) {
  AutocorrelationAuxExtractor ext{FeatureConfig{}};
  AuxiliaryFeatures aux = ext.Extract(Sine(220, 0.5, 16000));
  ASSERT_EQ(aux.num_frames(), 100);
  std::vector<double> pitch;
  for (int i = 5; i < 95; ++i) {
    pitch.push_back(aux.pitch(i));
    EXPECT_GT(aux.pov(i), 0.95) << i;
  }
  std::nth_element(pitch.begin(), pitch.begin() + pitch.size() / 2, pitch.end());
  EXPECT_NEAR(pitch[pitch.size() / 2], 220.0, 5.0);
}

TEST(AuxTest, HarmonicSourcePitch) {
  std::vector<double> x(16000, 0.0);
  for (int h = 1; h <= 6; ++h) {
    std::vector<double> s = Sine(130.0 * h, 0.3 / h, 16000);
    for (size_t i = 0; i < x.size(); ++i) x[i] += s[i];
  }
  AutocorrelationAuxExtractor ext{FeatureConfig{}};
  AuxiliaryFeatures aux = ext.Extract(x);
  for (int i = 5; i < 95; ++i) EXPECT_NEAR(aux.pitch(i), 130.0, 3.0) << i;
}

TEST(AuxTest, SilenceUnvoiced) {
  AutocorrelationAuxExtractor ext{FeatureConfig{}};
  AuxiliaryFeatures aux = ext.Extract(std::vector<double>(8000, 0.0));
  for (int i = 0; i < aux.num_frames(); ++i) EXPECT_LT(aux.pov(i), 1e-6);
}

TEST(AuxTest, EnergyShiftsByLogScale) {
  AutocorrelationAuxExtractor ext{FeatureConfig{}};
  Rng rng(8);
  std::vector<double> x(4000);
  for (double& s : x) s = rng.Normal() * 0.1;
  std::vector<double> y = x;
  for (double& s : y) s *= 3.0;
  AuxiliaryFeatures a = ext.Extract(x), b = ext.Extract(y);
  for (int i = 0; i < a.num_frames(); ++i) {
    EXPECT_NEAR(b.energy(i) - a.energy(i), 2.0 * std::log(3.0), 1e-6);
  }
}

TEST(WavTest, RoundTrip) {
  const std::string path =
      (std::filesystem::temp_directory_path() / "ctxtts_wav_test.wav").string();
  std::vector<double> x = Sine(440, 0.5, 3210);
  WriteWav(path, x, 16000);
  WavInfo info = ReadWavInfo(path);
  EXPECT_EQ(info.sample_rate, 16000);
  EXPECT_EQ(info.channels, 1);
  EXPECT_EQ(info.num_samples, 3210);
  Waveform w = ReadWav(path);
  ASSERT_EQ(w.samples.size(), x.size());
  for (size_t i = 0; i < x.size(); ++i) EXPECT_EQ(w.samples[i], QuantizePcm16(x[i]));
  std::remove(path.c_str());
  EXPECT_THROW(ReadWav(path), Error);
}

TEST(ReflectTest, Indices) {
  EXPECT_EQ(ReflectIndex(-1, 5), 1);
  EXPECT_EQ(ReflectIndex(-4, 5), 4);
  EXPECT_EQ(ReflectIndex(5, 5), 3);
  EXPECT_EQ(ReflectIndex(9, 5), 1);
  EXPECT_EQ(ReflectIndex(-7, 1), 0);
}

}  // namespace
}  // namespace ctxtts::audio
