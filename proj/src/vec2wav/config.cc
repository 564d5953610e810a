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

#include "ctxtts/vec2wav/config.h"

#include "ctxtts/common/error.h"

namespace ctxtts::vec2wav {

using nlohmann::json;

void Vec2WavConfig::Validate() const {
  features.Validate();
  CTXTTS_CHECK(num_tokens >= 1, errc::kInvalidConfig, "vec2wav needs K >= 1");
  CTXTTS_CHECK(blocks >= 0 && heads > 0 && d_model > 0 && d_model % heads == 0 && ffn_dim > 0 &&
                   conv_kernel >= 1 && mel_kernel >= 1 && mel_channels > 0,
               errc::kInvalidConfig, "invalid semantic encoder sizes");
  int product = 1;
  for (int u : upsample_factors) {
    CTXTTS_CHECK(u >= 1, errc::kInvalidConfig, "upsampling factors must be positive");
    product *= u;
  }
  CTXTTS_CHECK(product == features.hop, errc::kInvalidConfig,
               "upsampling factors multiply to " + std::to_string(product) +
                   " but a token frame has " + std::to_string(features.hop) + " samples");
  CTXTTS_CHECK(generator_channels >> upsample_factors.size() >= 1, errc::kInvalidConfig,
               "generator channels halve per stage and must stay positive");
  CTXTTS_CHECK(resblock_kernels.size() >= 1 && resblock_dilations.size() >= 1,
               errc::kInvalidConfig, "need at least one residual kernel and dilation");
  CTXTTS_CHECK(scales >= 0 && disc_channels > 0, errc::kInvalidConfig,
               "invalid discriminator sizes");
  CTXTTS_CHECK(warmup_steps >= 0 && mel_weight >= 0 && feature_weight >= 0 && aux_weight >= 0,
               errc::kInvalidConfig, "invalid loss weights");
  CTXTTS_CHECK(prompt_min_seconds > 0 && prompt_max_seconds >= prompt_min_seconds &&
                   min_target_frames >= 1 && crop_frames >= 1,
               errc::kInvalidConfig, "invalid prompt/target split");
  for (double s : aux_std) CTXTTS_CHECK(s > 0, errc::kInvalidConfig, "aux_std must be positive");
}

void to_json(json& j, const Vec2WavConfig& c) {
  j = {{"num_tokens", c.num_tokens},
       {"blocks", c.blocks},
       {"heads", c.heads},
       {"d_model", c.d_model},
       {"ffn_dim", c.ffn_dim},
       {"conv_kernel", c.conv_kernel},
       {"mel_kernel", c.mel_kernel},
       {"mel_channels", c.mel_channels},
       {"features", c.features},
       {"generator_channels", c.generator_channels},
       {"upsample_factors", c.upsample_factors},
       {"resblock_kernels", c.resblock_kernels},
       {"resblock_dilations", c.resblock_dilations},
       {"periods", c.periods},
       {"scales", c.scales},
       {"disc_channels", c.disc_channels},
       {"warmup_steps", c.warmup_steps},
       {"mel_weight", c.mel_weight},
       {"feature_weight", c.feature_weight},
       {"aux_weight", c.aux_weight},
       {"prompt_min_seconds", c.prompt_min_seconds},
       {"prompt_max_seconds", c.prompt_max_seconds},
       {"min_target_frames", c.min_target_frames},
       {"crop_frames", c.crop_frames},
       {"aux_mean", c.aux_mean},
       {"aux_std", c.aux_std}};
}

void from_json(const json& j, Vec2WavConfig& c) {
  Vec2WavConfig d;
  c.num_tokens = j.value("num_tokens", d.num_tokens);
  c.blocks = j.value("blocks", d.blocks);
  c.heads = j.value("heads", d.heads);
  c.d_model = j.value("d_model", d.d_model);
  c.ffn_dim = j.value("ffn_dim", d.ffn_dim);
  c.conv_kernel = j.value("conv_kernel", d.conv_kernel);
  c.mel_kernel = j.value("mel_kernel", d.mel_kernel);
  c.mel_channels = j.value("mel_channels", d.mel_channels);
  c.features = j.contains("features") ? j.at("features").get<audio::FeatureConfig>() : d.features;
  c.generator_channels = j.value("generator_channels", d.generator_channels);
  c.upsample_factors = j.value("upsample_factors", d.upsample_factors);
  c.resblock_kernels = j.value("resblock_kernels", d.resblock_kernels);
  c.resblock_dilations = j.value("resblock_dilations", d.resblock_dilations);
  c.periods = j.value("periods", d.periods);
  c.scales = j.value("scales", d.scales);
  c.disc_channels = j.value("disc_channels", d.disc_channels);
  c.warmup_steps = j.value("warmup_steps", d.warmup_steps);
  c.mel_weight = j.value("mel_weight", d.mel_weight);
  c.feature_weight = j.value("feature_weight", d.feature_weight);
  c.aux_weight = j.value("aux_weight", d.aux_weight);
  c.prompt_min_seconds = j.value("prompt_min_seconds", d.prompt_min_seconds);
  c.prompt_max_seconds = j.value("prompt_max_seconds", d.prompt_max_seconds);
  c.min_target_frames = j.value("min_target_frames", d.min_target_frames);
  c.crop_frames = j.value("crop_frames", d.crop_frames);
  c.aux_mean = j.value("aux_mean", d.aux_mean);
  c.aux_std = j.value("aux_std", d.aux_std);
}

void to_json(json& j, const Vec2WavTrainConfig& c) {
  j = {{"max_steps", c.max_steps},
       {"time_limit_seconds", c.time_limit_seconds},
       {"learning_rate", c.learning_rate},
       {"disc_learning_rate", c.disc_learning_rate},
       {"min_learning_rate", c.min_learning_rate},
       {"beta1", c.beta1},
       {"beta2", c.beta2},
       {"weight_decay", c.weight_decay},
       {"clip_norm", c.clip_norm},
       {"log_every", c.log_every}};
}

void from_json(const json& j, Vec2WavTrainConfig& c) {
  Vec2WavTrainConfig d;
  c.max_steps = j.value("max_steps", d.max_steps);
  c.time_limit_seconds = j.value("time_limit_seconds", d.time_limit_seconds);
  c.learning_rate = j.value("learning_rate", d.learning_rate);
  c.disc_learning_rate = j.value("disc_learning_rate", d.disc_learning_rate);
  c.min_learning_rate = j.value("min_learning_rate", d.min_learning_rate);
  c.beta1 = j.value("beta1", d.beta1);
  c.beta2 = j.value("beta2", d.beta2);
  c.weight_decay = j.value("weight_decay", d.weight_decay);
  c.clip_norm = j.value("clip_norm", d.clip_norm);
  c.log_every = j.value("log_every", d.log_every);
}

}  // namespace ctxtts::vec2wav
