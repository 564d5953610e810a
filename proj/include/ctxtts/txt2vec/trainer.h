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

#ifndef CTXTTS_TXT2VEC_TRAINER_H_
#define CTXTTS_TXT2VEC_TRAINER_H_

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "ctxtts/data/manifest.h"
#include "ctxtts/txt2vec/inference.h"
#include "ctxtts/txt2vec/training.h"

namespace ctxtts::txt2vec {

struct TrainProgress {
  int step = 0;
  double learning_rate = 0.0;
  double grad_norm = 0.0;
  double seconds = 0.0;
  LossBreakdown loss;  // averaged over the batch
};

struct TrainSummary {
  int steps = 0;
  double seconds = 0.0;
  std::vector<double> loss_history;  // total loss per optimizer step
};

// AdamW with linear warmup and cosine decay to min_learning_rate. Stops at
// max_steps or when the time limit is reached.
TrainSummary TrainTxt2Vec(Txt2VecModel* model, const diffusion::TransitionSchedule& sched,
                          const std::vector<TrainingExample>& examples,
                          const Txt2VecTrainConfig& config, Rng& rng,
                          const std::function<void(const TrainProgress&)>& on_log = {});

struct ContinuationScore {
  int prompt_frames = 0;
  int expected = 0;   // frames after the prompt in the reference
  int generated = 0;  // frames produced by the model
  int matched = 0;    // position-wise equal tokens

  double accuracy() const {
    const int denom = std::max(expected, generated);
    return denom == 0 ? 1.0 : static_cast<double>(matched) / denom;
  }
};

// Continues a known utterance from its first phonemes (cut at the phoneme
// boundary closest to prompt_frames) and compares the generated region with
// the reference tokens. Length differences count as errors.
ContinuationScore ScoreContinuation(const Txt2VecModel& model,
                                    const diffusion::TransitionSchedule& sched,
                                    const TrainingExample& example, int prompt_frames,
                                    Rng& rng, const InferenceOptions& options = {});

void SaveTxt2Vec(const std::string& path, const Txt2VecModel& model,
                 const diffusion::TransitionSchedule& sched,
                 const data::PhonemeInventory& inventory);

struct LoadedTxt2Vec {
  std::unique_ptr<Txt2VecModel> model;
  std::unique_ptr<diffusion::TransitionSchedule> schedule;
  data::PhonemeInventory inventory;
};

// Rebuilds the model from the stored config and checks that the stored
// schedule equals the one the config implies (and `expected`, when given).
// Throws Error(kCheckpointMismatch) otherwise.
LoadedTxt2Vec LoadTxt2Vec(const std::string& path,
                          const diffusion::TransitionSchedule* expected = nullptr);

}  // namespace ctxtts::txt2vec

#endif  // CTXTTS_TXT2VEC_TRAINER_H_
