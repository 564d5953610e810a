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

#include "ctxtts/txt2vec/config.h"

#include <cmath>

#include "ctxtts/common/error.h"

namespace ctxtts::txt2vec {

using nlohmann::json;

void Txt2VecConfig::Validate() const {
  CTXTTS_CHECK(num_tokens >= 1 && num_phonemes >= 1, errc::kInvalidConfig,
               "txt2vec needs K >= 1 and a nonempty phoneme inventory");
  CTXTTS_CHECK(d_model > 0 && heads > 0 && d_model % heads == 0 && ffn_dim > 0,
               errc::kInvalidConfig, "d_model must be a positive multiple of heads");
  CTXTTS_CHECK(text_blocks >= 0 && decoder_blocks >= 1 && duration_layers >= 1 &&
                   duration_kernel >= 1 && duration_channels >= 1,
               errc::kInvalidConfig, "invalid txt2vec block counts");
  CTXTTS_CHECK(steps >= 1, errc::kInvalidConfig, "T must be at least 1");
  double total = 0.0;
  for (double p : proportions) {
    CTXTTS_CHECK(p >= 0.0, errc::kInvalidConfig, "negative segmentation proportion");
    total += p;
  }
  CTXTTS_CHECK(std::abs(total - 1.0) < 1e-9, errc::kInvalidConfig,
               "segmentation proportions must sum to 1");
  CTXTTS_CHECK(min_x0_frames > 0, errc::kInvalidConfig, "min_x0_frames must be positive");
  CTXTTS_CHECK(frame_rate > 0.0 && ctx_a_min_seconds >= 0.0 &&
                   ctx_a_max_seconds >= ctx_a_min_seconds,
               errc::kInvalidConfig, "invalid context-A range");
  CTXTTS_CHECK(gamma_loss >= 0.0 && aux_weight >= 0.0, errc::kInvalidConfig,
               "loss weights must be nonnegative");
}

diffusion::TransitionSchedule Txt2VecConfig::MakeSchedule() const {
  return diffusion::TransitionSchedule::Linear(steps, num_tokens, schedule);
}

void to_json(json& j, const Txt2VecConfig& c) {
  j = {{"num_tokens", c.num_tokens},
       {"num_phonemes", c.num_phonemes},
       {"d_model", c.d_model},
       {"heads", c.heads},
       {"ffn_dim", c.ffn_dim},
       {"text_blocks", c.text_blocks},
       {"decoder_blocks", c.decoder_blocks},
       {"duration_channels", c.duration_channels},
       {"duration_kernel", c.duration_kernel},
       {"duration_layers", c.duration_layers},
       {"steps", c.steps},
       {"terminal_alpha_bar", c.schedule.terminal_alpha_bar},
       {"terminal_gamma_bar", c.schedule.terminal_gamma_bar},
       {"gamma_loss", c.gamma_loss},
       {"aux_weight", c.aux_weight},
       {"proportions", c.proportions},
       {"min_x0_frames", c.min_x0_frames},
       {"frame_rate", c.frame_rate},
       {"ctx_a_min_seconds", c.ctx_a_min_seconds},
       {"ctx_a_max_seconds", c.ctx_a_max_seconds}};
}

void from_json(const json& j, Txt2VecConfig& c) {
  Txt2VecConfig d;
  c.num_tokens = j.value("num_tokens", d.num_tokens);
  c.num_phonemes = j.value("num_phonemes", d.num_phonemes);
  c.d_model = j.value("d_model", d.d_model);
  c.heads = j.value("heads", d.heads);
  c.ffn_dim = j.value("ffn_dim", d.ffn_dim);
  c.text_blocks = j.value("text_blocks", d.text_blocks);
  c.decoder_blocks = j.value("decoder_blocks", d.decoder_blocks);
  c.duration_channels = j.value("duration_channels", d.duration_channels);
  c.duration_kernel = j.value("duration_kernel", d.duration_kernel);
  c.duration_layers = j.value("duration_layers", d.duration_layers);
  c.steps = j.value("steps", d.steps);
  c.schedule.terminal_alpha_bar = j.value("terminal_alpha_bar", d.schedule.terminal_alpha_bar);
  c.schedule.terminal_gamma_bar = j.value("terminal_gamma_bar", d.schedule.terminal_gamma_bar);
  c.gamma_loss = j.value("gamma_loss", d.gamma_loss);
  c.aux_weight = j.value("aux_weight", d.aux_weight);
  c.proportions = j.value("proportions", d.proportions);
  c.min_x0_frames = j.value("min_x0_frames", d.min_x0_frames);
  c.frame_rate = j.value("frame_rate", d.frame_rate);
  c.ctx_a_min_seconds = j.value("ctx_a_min_seconds", d.ctx_a_min_seconds);
  c.ctx_a_max_seconds = j.value("ctx_a_max_seconds", d.ctx_a_max_seconds);
}

void to_json(json& j, const Txt2VecTrainConfig& c) {
  j = {{"max_steps", c.max_steps},
       {"time_limit_seconds", c.time_limit_seconds},
       {"batch_size", c.batch_size},
       {"learning_rate", c.learning_rate},
       {"min_learning_rate", c.min_learning_rate},
       {"warmup_steps", c.warmup_steps},
       {"weight_decay", c.weight_decay},
       {"clip_norm", c.clip_norm},
       {"log_every", c.log_every}};
}

void from_json(const json& j, Txt2VecTrainConfig& c) {
  Txt2VecTrainConfig d;
  c.max_steps = j.value("max_steps", d.max_steps);
  c.time_limit_seconds = j.value("time_limit_seconds", d.time_limit_seconds);
  c.batch_size = j.value("batch_size", d.batch_size);
  c.learning_rate = j.value("learning_rate", d.learning_rate);
  c.min_learning_rate = j.value("min_learning_rate", d.min_learning_rate);
  c.warmup_steps = j.value("warmup_steps", d.warmup_steps);
  c.weight_decay = j.value("weight_decay", d.weight_decay);
  c.clip_norm = j.value("clip_norm", d.clip_norm);
  c.log_every = j.value("log_every", d.log_every);
}

}  // namespace ctxtts::txt2vec
