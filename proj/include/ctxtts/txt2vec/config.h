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

#ifndef CTXTTS_TXT2VEC_CONFIG_H_
#define CTXTTS_TXT2VEC_CONFIG_H_

#include <array>

#include "json.hpp"

#include "ctxtts/diffusion/schedule.h"

namespace ctxtts::txt2vec {

struct Txt2VecConfig {
  int num_tokens = 0;  // K; filled from the data when zero
  int num_phonemes = 0;
  int d_model = 512;
  int heads = 8;
  int ffn_dim = 2048;
  int text_blocks = 6;
  int decoder_blocks = 12;
  int duration_channels = 256;
  int duration_kernel = 3;
  int duration_layers = 2;
  int steps = 100;  // T
  diffusion::ScheduleParams schedule;
  double gamma_loss = 1.0;
  double aux_weight = 0.001;
  // Training segmentation: probabilities of (both contexts, context A only,
  // no context).
  std::array<double, 3> proportions = {0.6, 0.3, 0.1};
  int min_x0_frames = 100;
  double frame_rate = 100.0;
  double ctx_a_min_seconds = 2.0;
  double ctx_a_max_seconds = 3.0;

  void Validate() const;
  diffusion::TransitionSchedule MakeSchedule() const;
};

void to_json(nlohmann::json& j, const Txt2VecConfig& c);
void from_json(const nlohmann::json& j, Txt2VecConfig& c);

struct Txt2VecTrainConfig {
  int max_steps = 20000;
  double time_limit_seconds = 0.0;  // zero means no limit
  int batch_size = 1;  // utterances per optimizer step
  double learning_rate = 1e-3;
  double min_learning_rate = 1e-4;
  int warmup_steps = 200;
  double weight_decay = 4.5e-2;
  double clip_norm = 1.0;
  int log_every = 100;
};

void to_json(nlohmann::json& j, const Txt2VecTrainConfig& c);
void from_json(const nlohmann::json& j, Txt2VecTrainConfig& c);

}  // namespace ctxtts::txt2vec

#endif  // CTXTTS_TXT2VEC_CONFIG_H_
