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

#ifndef CTXTTS_VEC2WAV_CONFIG_H_
#define CTXTTS_VEC2WAV_CONFIG_H_

#include <array>
#include <vector>

#include "json.hpp"

#include "ctxtts/audio/features.h"

namespace ctxtts::vec2wav {

struct Vec2WavConfig {
  int num_tokens = 0;  // K; filled from the data when zero
  int blocks = 2;      // per semantic encoder; there are two encoders
  int heads = 2;
  int d_model = 184;
  int ffn_dim = 736;
  int conv_kernel = 15;  // depthwise kernel inside each block
  int mel_kernel = 5;
  int mel_channels = 184;
  audio::FeatureConfig features;

  // Generator. The product of the upsampling factors equals the hop.
  int generator_channels = 256;
  std::vector<int> upsample_factors = {5, 4, 4, 2};
  std::vector<int> resblock_kernels = {3, 7, 11};
  std::vector<int> resblock_dilations = {1, 3, 5};

  // Discriminators.
  std::vector<int> periods = {2, 3, 5, 7, 11};
  int scales = 3;
  int disc_channels = 32;

  // Losses and schedule.
  int warmup_steps = 20000;
  double mel_weight = 45.0;
  double feature_weight = 2.0;
  double aux_weight = 1.0;

  // Prompt/target split during training.
  double prompt_min_seconds = 2.0;
  double prompt_max_seconds = 3.0;
  int min_target_frames = 20;
  int crop_frames = 32;  // generator training window

  // Affine normalization of (log pitch, energy, pov) inside the model.
  std::array<double, 3> aux_mean = {5.0, -3.0, 0.5};
  std::array<double, 3> aux_std = {0.5, 3.0, 0.5};

  int hop() const { return features.hop; }
  void Validate() const;
  bool operator==(const Vec2WavConfig&) const = default;
};

void to_json(nlohmann::json& j, const Vec2WavConfig& c);
void from_json(const nlohmann::json& j, Vec2WavConfig& c);

struct Vec2WavTrainConfig {
  int max_steps = 2000;
  double time_limit_seconds = 0.0;
  double learning_rate = 2e-4;
  double disc_learning_rate = 2e-4;
  double min_learning_rate = 2e-5;
  double beta1 = 0.8;
  double beta2 = 0.99;
  double weight_decay = 0.0;
  double clip_norm = 10.0;
  int log_every = 50;
};

void to_json(nlohmann::json& j, const Vec2WavTrainConfig& c);
void from_json(const nlohmann::json& j, Vec2WavTrainConfig& c);

}  // namespace ctxtts::vec2wav

#endif  // CTXTTS_VEC2WAV_CONFIG_H_
