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

#include "ctxtts/vec2wav/discriminator.h"

#include <string>

#include "ctxtts/audio/features.h"
#include "ctxtts/common/error.h"

namespace ctxtts::vec2wav {

using nn::Tensor;

namespace {

constexpr double kSlope = 0.1;

nn::ConvOptions Strided(int kernel, int stride) {
  nn::ConvOptions o;
  o.kernel = kernel;
  o.stride = stride;
  o.pad_left = (kernel - 1) / 2;
  o.pad_right = (kernel - 1) / 2;
  return o;
}

}  // namespace

ConvStack::ConvStack(int channels, const std::vector<std::pair<int, int>>& layers, Rng& rng)
    : out_(channels, 1, Strided(3, 1), rng) {
  int in = 1;
  for (size_t i = 0; i < layers.size(); ++i) {
    convs_.push_back(std::make_unique<nn::Conv1d>(
        in, channels, Strided(layers[i].first, layers[i].second), rng));
    RegisterModule("conv" + std::to_string(i), convs_.back().get());
    in = channels;
  }
  RegisterModule("out", &out_);
}

DiscriminatorOutput ConvStack::Forward(const Tensor& x) const {
  DiscriminatorOutput out;
  Tensor h = x;
  for (const auto& conv : convs_) {
    h = nn::LeakyRelu(conv->Forward(h), kSlope);
    out.features.push_back(h);
  }
  out.score = out_.Forward(h);
  out.features.push_back(out.score);
  return out;
}

PeriodDiscriminator::PeriodDiscriminator(int period, int channels, Rng& rng)
    : period_(period), stack_(channels, {{5, 3}, {5, 3}, {5, 1}}, rng) {
  RegisterModule("stack", &stack_);
}

DiscriminatorOutput PeriodDiscriminator::Forward(const Tensor& wave) const {
  const long n = wave.rows();
  const long rows = (n + period_ - 1) / period_;
  // Reflect-pad to a whole number of periods, then fold.
  std::vector<int> index(rows * period_);
  for (long i = 0; i < rows * period_; ++i) {
    index[i] = static_cast<int>(audio::ReflectIndex(i, n));
  }
  Tensor folded = nn::Reshape(nn::GatherRows(wave, index), rows, period_);
  DiscriminatorOutput out;
  std::vector<Tensor> scores;
  for (int c = 0; c < period_; ++c) {
    DiscriminatorOutput col = stack_.Forward(nn::SliceCols(folded, c, 1));
    scores.push_back(col.score);
    if (out.features.empty()) {
      out.features = col.features;
    } else {
      for (size_t f = 0; f < col.features.size(); ++f) {
        out.features[f] = nn::ConcatRows({out.features[f], col.features[f]});
      }
    }
  }
  out.score = nn::ConcatRows(scores);
  return out;
}

ScaleDiscriminator::ScaleDiscriminator(int pool_steps, int channels, Rng& rng)
    : pool_steps_(pool_steps), stack_(channels, {{15, 1}, {11, 4}, {11, 4}, {5, 1}}, rng) {
  RegisterModule("stack", &stack_);
}

DiscriminatorOutput ScaleDiscriminator::Forward(const Tensor& wave) const {
  Tensor x = wave;
  for (int i = 0; i < pool_steps_; ++i) x = nn::AvgPool1d(x, 4, 2, 1);
  return stack_.Forward(x);
}

Discriminators::Discriminators(const Vec2WavConfig& c, Rng& rng) {
  for (int p : c.periods) {
    CTXTTS_CHECK(p >= 1, errc::kInvalidConfig, "periods must be positive");
    periods_.push_back(std::make_unique<PeriodDiscriminator>(p, c.disc_channels, rng));
    RegisterModule("period" + std::to_string(p), periods_.back().get());
  }
  for (int s = 0; s < c.scales; ++s) {
    scales_.push_back(std::make_unique<ScaleDiscriminator>(s, c.disc_channels, rng));
    RegisterModule("scale" + std::to_string(s), scales_.back().get());
  }
}

std::vector<DiscriminatorOutput> Discriminators::Forward(const Tensor& wave) const {
  std::vector<DiscriminatorOutput> out;
  for (const auto& d : periods_) out.push_back(d->Forward(wave));
  for (const auto& d : scales_) out.push_back(d->Forward(wave));
  return out;
}

}  // namespace ctxtts::vec2wav
