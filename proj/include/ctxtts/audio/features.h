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

#ifndef CTXTTS_AUDIO_FEATURES_H_
#define CTXTTS_AUDIO_FEATURES_H_

#include <memory>
#include <span>
#include <vector>

#include "json.hpp"

#include "ctxtts/nn/tensor.h"

namespace ctxtts::audio {

// Shared framing for mel, auxiliary features and semantic tokens. Frame j
// covers samples [j*hop, (j+1)*hop) and its analysis window is centred on
// that interval, reflecting the signal at the edges. A signal of N samples
// therefore has ceil(N / hop) frames.
struct FeatureConfig {
  int sample_rate = 16000;
  int hop = 160;
  int win = 400;
  int n_fft = 512;
  int num_mels = 80;
  double fmin = 0.0;
  double fmax = 8000.0;
  double log_floor = 1e-5;
  double min_f0 = 50.0;
  double max_f0 = 400.0;
  int pitch_window = 400;

  int NumFrames(long samples) const {
    return static_cast<int>((samples + hop - 1) / hop);
  }
  void Validate() const;
  bool operator==(const FeatureConfig&) const = default;
};

void to_json(nlohmann::json& j, const FeatureConfig& c);
void from_json(const nlohmann::json& j, FeatureConfig& c);

// Frame-major log-mel energies; only ever used as an acoustic prompt or a
// reconstruction target.
struct MelSpectrogram {
  nn::Matrix frames;  // [num_frames x num_mels]
  int hop = 160;
  int sample_rate = 16000;

  int num_frames() const { return static_cast<int>(frames.rows()); }
};

// Per-frame (pitch Hz, log energy, voicing probability).
struct AuxiliaryFeatures {
  nn::Matrix values;  // [num_frames x 3]

  int num_frames() const { return static_cast<int>(values.rows()); }
  double pitch(int i) const { return values(i, 0); }
  double energy(int i) const { return values(i, 1); }
  double pov(int i) const { return values(i, 2); }
};

// Index of sample i in a signal of length n under edge reflection.
long ReflectIndex(long i, long n);

class MelExtractor {
 public:
  explicit MelExtractor(FeatureConfig config);

  const FeatureConfig& config() const { return config_; }

  // Throws on empty or non-finite input.
  MelSpectrogram Compute(std::span<const double> samples) const;

  // Same features on a [N x 1] waveform tensor, differentiable. A tiny
  // constant inside the magnitude's square root keeps gradients finite.
  nn::Tensor ComputeDifferentiable(const nn::Tensor& waveform) const;

  const nn::Matrix& mel_basis() const { return mel_basis_; }

 private:
  std::vector<int> FrameIndex(long samples) const;

  FeatureConfig config_;
  nn::Matrix dft_cos_;  // [win x bins], window folded in
  nn::Matrix dft_sin_;
  nn::Matrix mel_basis_;  // [bins x num_mels]
};

// Pluggable source of pitch, energy and voicing features.
class AuxFeatureExtractor {
 public:
  virtual ~AuxFeatureExtractor() = default;
  virtual AuxiliaryFeatures Extract(std::span<const double> samples) const = 0;
};

// Normalized cross-correlation pitch tracker with Viterbi smoothing over lag
// candidates. pov is the clamped correlation peak, energy the log frame
// energy.
class AutocorrelationAuxExtractor : public AuxFeatureExtractor {
 public:
  explicit AutocorrelationAuxExtractor(FeatureConfig config);
  AuxiliaryFeatures Extract(std::span<const double> samples) const override;

 private:
  FeatureConfig config_;
};

}  // namespace ctxtts::audio

#endif  // CTXTTS_AUDIO_FEATURES_H_
