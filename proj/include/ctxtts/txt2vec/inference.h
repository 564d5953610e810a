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

#ifndef CTXTTS_TXT2VEC_INFERENCE_H_
#define CTXTTS_TXT2VEC_INFERENCE_H_

#include <functional>
#include <span>
#include <vector>

#include "ctxtts/common/rng.h"
#include "ctxtts/diffusion/process.h"
#include "ctxtts/txt2vec/model.h"

namespace ctxtts::txt2vec {

// Inputs of contextual generation. Contexts are in the diffusion alphabet
// (1..K); B inputs are all empty for continuation.
struct EditInputs {
  std::vector<int> phonemes_a;
  std::vector<int> phonemes_d;
  std::vector<int> phonemes_b;
  std::vector<int> durations_a;
  std::vector<int> durations_b;
  diffusion::TokenSequence context_a;
  diffusion::TokenSequence context_b;
};

struct EditResult {
  diffusion::TokenSequence tokens;  // [c_A, x_0, c_B]
  int a_len = 0;
  int x_len = 0;
  int b_len = 0;
  double alpha = 1.0;
  std::vector<double> predicted_durations;  // unscaled, for y^D
  std::vector<int> durations;  // rounded alpha-scaled, for y^D
};

struct InferenceOptions {
  double temperature = 1.0;
};

// Ratio of ground-truth to predicted context frames. Defined as 1 when
// there is no context, or when the predicted context length is zero.
double DurationScale(std::span<const int> truth_a, std::span<const int> truth_b,
                     std::span<const double> predicted_a,
                     std::span<const double> predicted_b);

// Rounds half up on the running sum and takes differences, so the total is
// the rounded total and no per-phoneme error reaches one frame.
std::vector<int> RoundDurations(std::span<const double> frames);

// Distribution over the K real tokens for each data position, given the
// decoder input, the step and the regulated text encoding.
using Denoiser = std::function<Eigen::MatrixXd(const std::vector<int>& sequence,
                                               const std::vector<int>& indicator, int t,
                                               const nn::Tensor& h)>;

Denoiser ModelDenoiser(const Txt2VecModel& model);

// Contextual generation: encode [y^A, y^D, y^B], predict durations, rescale
// the y^D durations by DurationScale, regulate with [d^A, round(alpha d^D),
// d^B] and run T reverse steps from an all-mask x_T while the contexts stay
// fixed.
EditResult InferEdit(const Txt2VecModel& model, const diffusion::TransitionSchedule& sched,
                     const EditInputs& inputs, Rng& rng, const InferenceOptions& options = {});
EditResult InferEdit(const Txt2VecModel& model, const diffusion::TransitionSchedule& sched,
                     const EditInputs& inputs, Rng& rng, const Denoiser& denoiser,
                     const InferenceOptions& options = {});

// InferEdit with empty context B.
EditResult InferContinue(const Txt2VecModel& model, const diffusion::TransitionSchedule& sched,
                         const std::vector<int>& phonemes_a, const std::vector<int>& phonemes_d,
                         const std::vector<int>& durations_a,
                         const diffusion::TokenSequence& context_a, Rng& rng,
                         const InferenceOptions& options = {});

}  // namespace ctxtts::txt2vec

#endif  // CTXTTS_TXT2VEC_INFERENCE_H_
