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

#ifndef CTXTTS_TXT2VEC_TRAINING_H_
#define CTXTTS_TXT2VEC_TRAINING_H_

#include <span>
#include <vector>

#include "ctxtts/common/rng.h"
#include "ctxtts/data/manifest.h"
#include "ctxtts/diffusion/process.h"
#include "ctxtts/txt2vec/model.h"

namespace ctxtts::txt2vec {

// One utterance in model units: phoneme ids, per-phoneme frame counts and
// tokens in the diffusion alphabet (1..K).
struct TrainingExample {
  std::vector<int> phonemes;
  std::vector<int> durations;
  std::vector<int> tokens;

  int num_frames() const { return static_cast<int>(tokens.size()); }
};

// Manifest tokens are 0-based; the diffusion alphabet starts at 1.
std::vector<TrainingExample> ExamplesFromRecords(
    const std::vector<data::UtteranceRecord>& records,
    const data::PhonemeInventory& inventory, int num_tokens);

// Frame split [c_A | x_0 | c_B] of one utterance.
struct Segment {
  enum Kind { kBothContexts = 1, kContextA = 2, kNoContext = 3 };

  Kind kind = kNoContext;
  int a_len = 0;
  int x_len = 0;
  int b_len = 0;
};

// Draws a configuration with the configured proportions and resamples it
// while the utterance is too short for it. Both-context splits draw |x_0|
// uniformly from (min_x0_frames, total) and its start uniformly; context-A
// splits draw |c_A| uniformly from the configured seconds range.
Segment SegmentForTraining(int total_frames, Rng& rng, const Txt2VecConfig& config);

// Per-position variational term of the discrete diffusion bound, [L x 1]:
// KL(q(x_{t-1} | x_t, x_0) || p(x_{t-1} | x_t)) for t > 1 and
// -log p(x_0 | x_1) for t = 1. probs holds the denoiser's distribution over
// the K real tokens for each position; gradients flow into it.
nn::Tensor DiffusionTerm(const nn::Tensor& probs, std::span<const int> xt,
                         std::span<const int> x0, int t,
                         const diffusion::TransitionSchedule& sched);

struct LossBreakdown {
  double total = 0.0;
  double duration = 0.0;
  double diffusion = 0.0;
  double aux = 0.0;
  double accuracy = 0.0;  // argmax of the denoiser against x_0
};

// Duration MSE on log(1 + d) plus gamma times (mean diffusion term plus
// aux_weight times the x_0 cross-entropy), both over the x_t segment only.
nn::Tensor TrainingLoss(const Txt2VecModel& model, const diffusion::TransitionSchedule& sched,
                        const TrainingExample& example, const Segment& segment, int t,
                        std::span<const int> xt, LossBreakdown* breakdown = nullptr);

// Draws the segmentation, t ~ U{1..T} and x_t ~ q(x_t | x_0), then
// evaluates TrainingLoss.
nn::Tensor SampleTrainingLoss(const Txt2VecModel& model,
                              const diffusion::TransitionSchedule& sched,
                              const TrainingExample& example, Rng& rng,
                              LossBreakdown* breakdown = nullptr);

}  // namespace ctxtts::txt2vec

#endif  // CTXTTS_TXT2VEC_TRAINING_H_
