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

#ifndef CTXTTS_VEC2WAV_DISCRIMINATOR_H_
#define CTXTTS_VEC2WAV_DISCRIMINATOR_H_

#include <memory>
#include <vector>

#include "ctxtts/common/rng.h"
#include "ctxtts/nn/layers.h"
#include "ctxtts/vec2wav/config.h"

namespace ctxtts::vec2wav {

struct DiscriminatorOutput {
  nn::Tensor score;                   // per-position realness
  std::vector<nn::Tensor> features;   // intermediate activations
};

// Strided 1-D convolution stack shared by both discriminator families.
class ConvStack : public nn::Module {
 public:
  ConvStack(int channels, const std::vector<std::pair<int, int>>& kernel_stride, Rng& rng);
  DiscriminatorOutput Forward(const nn::Tensor& x) const;

 private:
  std::vector<std::unique_ptr<nn::Conv1d>> convs_;
  nn::Conv1d out_;
};

// Folds the waveform into `period` interleaved columns and runs one shared
// stack over each column.
class PeriodDiscriminator : public nn::Module {
 public:
  PeriodDiscriminator(int period, int channels, Rng& rng);
  DiscriminatorOutput Forward(const nn::Tensor& wave) const;

 private:
  int period_;
  ConvStack stack_;
};

// Runs on the waveform average-pooled `pool_steps` times by a factor of 2.
class ScaleDiscriminator : public nn::Module {
 public:
  ScaleDiscriminator(int pool_steps, int channels, Rng& rng);
  DiscriminatorOutput Forward(const nn::Tensor& wave) const;

 private:
  int pool_steps_;
  ConvStack stack_;
};

class Discriminators : public nn::Module {
 public:
  Discriminators(const Vec2WavConfig& config, Rng& rng);
  std::vector<DiscriminatorOutput> Forward(const nn::Tensor& wave) const;

 private:
  std::vector<std::unique_ptr<PeriodDiscriminator>> periods_;
  std::vector<std::unique_ptr<ScaleDiscriminator>> scales_;
};

}  // namespace ctxtts::vec2wav

#endif  // CTXTTS_VEC2WAV_DISCRIMINATOR_H_
