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

#include "ctxtts/txt2vec/inference.h"

#include <cmath>
#include <numeric>
#include <string>

#include "glog/logging.h"

#include "ctxtts/common/error.h"
#include "ctxtts/nn/ops.h"

namespace ctxtts::txt2vec {

using nn::Tensor;

double DurationScale(std::span<const int> truth_a, std::span<const int> truth_b,
                     std::span<const double> predicted_a, std::span<const double> predicted_b) {
  const double truth = std::accumulate(truth_a.begin(), truth_a.end(), 0.0) +
                       std::accumulate(truth_b.begin(), truth_b.end(), 0.0);
  const double predicted = std::accumulate(predicted_a.begin(), predicted_a.end(), 0.0) +
                           std::accumulate(predicted_b.begin(), predicted_b.end(), 0.0);
  if (truth_a.empty() && truth_b.empty()) return 1.0;
  if (predicted <= 0.0) {
    LOG_FIRST_N(WARNING, 1) << "predicted context length is zero; using alpha = 1";
    return 1.0;
  }
  return truth / predicted;
}

std::vector<int> RoundDurations(std::span<const double> frames) {
  std::vector<int> out(frames.size());
  double running = 0.0;
  long prev = 0;
  for (size_t i = 0; i < frames.size(); ++i) {
    CTXTTS_CHECK(frames[i] >= 0.0 && std::isfinite(frames[i]), errc::kInvalidArgument,
                 "durations must be finite and nonnegative");
    running += frames[i];
    const long cur = static_cast<long>(std::floor(running + 0.5));
    out[i] = static_cast<int>(cur - prev);
    prev = cur;
  }
  return out;
}

Denoiser ModelDenoiser(const Txt2VecModel& model) {
  return [&model](const std::vector<int>& seq, const std::vector<int>& indicator, int t,
                  const Tensor& h) -> Eigen::MatrixXd {
    return nn::Softmax(model.decoder().Forward(seq, indicator, t, h)).value();
  };
}

EditResult InferEdit(const Txt2VecModel& model, const diffusion::TransitionSchedule& sched,
                     const EditInputs& in, Rng& rng, const InferenceOptions& options) {
  return InferEdit(model, sched, in, rng, ModelDenoiser(model), options);
}

EditResult InferEdit(const Txt2VecModel& model, const diffusion::TransitionSchedule& sched,
                     const EditInputs& in, Rng& rng, const Denoiser& denoiser,
                     const InferenceOptions& options) {
  nn::NoGradGuard no_grad;
  CTXTTS_CHECK(!in.phonemes_d.empty(), errc::kInvalidArgument,
               "nothing to generate: y^D is empty");
  CTXTTS_CHECK(in.phonemes_a.size() == in.durations_a.size() &&
                   in.phonemes_b.size() == in.durations_b.size(),
               errc::kLengthMismatch, "context phonemes and durations differ in length");
  const int sum_a = std::accumulate(in.durations_a.begin(), in.durations_a.end(), 0);
  const int sum_b = std::accumulate(in.durations_b.begin(), in.durations_b.end(), 0);
  CTXTTS_CHECK(sum_a == static_cast<int>(in.context_a.size()) &&
                   sum_b == static_cast<int>(in.context_b.size()),
               errc::kLengthMismatch,
               "context durations sum to " + std::to_string(sum_a) + "/" +
                   std::to_string(sum_b) + " frames but the contexts hold " +
                   std::to_string(in.context_a.size()) + "/" +
                   std::to_string(in.context_b.size()) + " tokens");
  CTXTTS_CHECK(sched.num_tokens() == model.config().num_tokens &&
                   sched.steps() == model.config().steps,
               errc::kCheckpointMismatch, "schedule does not match the model");
  for (const auto* ctx : {&in.context_a, &in.context_b}) {
    for (int tok : *ctx) {
      CTXTTS_CHECK(sched.codebook().IsReal(tok), errc::kInvalidArgument,
                   "context tokens must be real tokens");
    }
  }

  std::vector<int> phonemes = in.phonemes_a;
  phonemes.insert(phonemes.end(), in.phonemes_d.begin(), in.phonemes_d.end());
  phonemes.insert(phonemes.end(), in.phonemes_b.begin(), in.phonemes_b.end());
  Tensor e = model.encoder().Forward(phonemes);
  const std::vector<double> predicted = DurationsFromLog(model.duration().Forward(e).value());
  const size_t na = in.phonemes_a.size(), nd = in.phonemes_d.size();
  std::span<const double> pred(predicted);

  EditResult result;
  result.alpha = DurationScale(in.durations_a, in.durations_b, pred.subspan(0, na),
                               pred.subspan(na + nd));
  result.predicted_durations.assign(predicted.begin() + na, predicted.begin() + na + nd);
  std::vector<double> scaled(nd);
  for (size_t i = 0; i < nd; ++i) scaled[i] = result.alpha * result.predicted_durations[i];
  result.durations = RoundDurations(scaled);

  std::vector<int> regulate = in.durations_a;
  regulate.insert(regulate.end(), result.durations.begin(), result.durations.end());
  regulate.insert(regulate.end(), in.durations_b.begin(), in.durations_b.end());
  result.a_len = sum_a;
  result.b_len = sum_b;
  result.x_len = std::accumulate(result.durations.begin(), result.durations.end(), 0);

  diffusion::TokenSequence x = diffusion::FullyMasked(result.x_len, sched);
  if (result.x_len > 0) {
    Tensor h = LengthRegulate(e, regulate);
    std::vector<int> indicator(sum_a + result.x_len + sum_b, 0);
    std::fill(indicator.begin() + sum_a, indicator.begin() + sum_a + result.x_len, 1);
    std::vector<int> seq(indicator.size());
    std::copy(in.context_a.begin(), in.context_a.end(), seq.begin());
    std::copy(in.context_b.begin(), in.context_b.end(), seq.begin() + sum_a + result.x_len);
    for (int t = sched.steps(); t >= 1; --t) {
      std::copy(x.begin(), x.end(), seq.begin() + sum_a);
      const Eigen::MatrixXd p = denoiser(seq, indicator, t, h);
      x = diffusion::BackwardStep(x, p, t, sched, rng, options.temperature);
    }
  }
  result.tokens = in.context_a;
  result.tokens.insert(result.tokens.end(), x.begin(), x.end());
  result.tokens.insert(result.tokens.end(), in.context_b.begin(), in.context_b.end());
  return result;
}

EditResult InferContinue(const Txt2VecModel& model, const diffusion::TransitionSchedule& sched,
                         const std::vector<int>& phonemes_a, const std::vector<int>& phonemes_d,
                         const std::vector<int>& durations_a,
                         const diffusion::TokenSequence& context_a, Rng& rng,
                         const InferenceOptions& options) {
  EditInputs in;
  in.phonemes_a = phonemes_a;
  in.phonemes_d = phonemes_d;
  in.durations_a = durations_a;
  in.context_a = context_a;
  return InferEdit(model, sched, in, rng, options);
}

}  // namespace ctxtts::txt2vec
