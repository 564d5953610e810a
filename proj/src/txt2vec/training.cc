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

#include "ctxtts/txt2vec/training.h"

#include <cmath>
#include <numeric>
#include <string>

#include "ctxtts/common/error.h"
#include "ctxtts/nn/ops.h"

namespace ctxtts::txt2vec {

using nn::Matrix;
using nn::Tensor;

std::vector<TrainingExample> ExamplesFromRecords(
    const std::vector<data::UtteranceRecord>& records,
    const data::PhonemeInventory& inventory, int num_tokens) {
  std::vector<TrainingExample> out;
  out.reserve(records.size());
  for (const data::UtteranceRecord& r : records) {
    TrainingExample ex;
    ex.phonemes = inventory.Ids(r.phonemes);
    ex.durations = r.durations;
    ex.tokens.reserve(r.tokens.size());
    for (int tok : r.tokens) {
      CTXTTS_CHECK(tok >= 0 && tok < num_tokens, errc::kInvalidArgument,
                   r.utt_id + ": token " + std::to_string(tok) + " outside [0, K)");
      ex.tokens.push_back(tok + 1);
    }
    CTXTTS_CHECK(std::accumulate(ex.durations.begin(), ex.durations.end(), 0) ==
                     ex.num_frames(),
                 errc::kLengthMismatch, r.utt_id + ": durations do not cover the tokens");
    out.push_back(std::move(ex));
  }
  return out;
}

Segment SegmentForTraining(int total, Rng& rng, const Txt2VecConfig& config) {
  CTXTTS_CHECK(total > config.min_x0_frames, errc::kInvalidArgument,
               "utterance of " + std::to_string(total) + " frames is not longer than " +
                   std::to_string(config.min_x0_frames));
  const int a_min = static_cast<int>(std::lround(config.ctx_a_min_seconds * config.frame_rate));
  const int a_max = static_cast<int>(std::lround(config.ctx_a_max_seconds * config.frame_rate));
  const bool both_ok = total - 1 >= config.min_x0_frames + 1;
  const bool a_ok = total > a_max;
  for (;;) {
    const int pick = rng.Categorical(config.proportions);
    Segment s;
    if (pick == 0) {
      if (!both_ok) continue;
      s.kind = Segment::kBothContexts;
      s.x_len = static_cast<int>(rng.UniformInt(config.min_x0_frames + 1, total - 1));
      s.a_len = static_cast<int>(rng.UniformInt(0, total - s.x_len));
      s.b_len = total - s.x_len - s.a_len;
    } else if (pick == 1) {
      if (!a_ok) continue;
      s.kind = Segment::kContextA;
      s.a_len = static_cast<int>(rng.UniformInt(a_min, a_max));
      s.x_len = total - s.a_len;
    } else {
      s.kind = Segment::kNoContext;
      s.x_len = total;
    }
    return s;
  }
}

Tensor DiffusionTerm(const Tensor& probs, std::span<const int> xt, std::span<const int> x0,
                     int t, const diffusion::TransitionSchedule& sched) {
  const int k = sched.num_tokens();
  const auto n = static_cast<Eigen::Index>(xt.size());
  CTXTTS_CHECK(probs.rows() == n && static_cast<Eigen::Index>(x0.size()) == n &&
                   probs.cols() == k,
               errc::kLengthMismatch, "diffusion term inputs disagree in shape");
  CTXTTS_CHECK(t >= 1 && t <= sched.steps(), errc::kInvalidArgument, "step outside [1, T]");
  const double abar = sched.alpha_bar(t - 1);
  const double bbar = sched.beta_bar(t - 1);
  const double gbar = sched.gamma_bar(t - 1);

  // Per-position cache for the backward pass.
  struct Cache {
    Eigen::VectorXd inv_lik;  // c_k / Qbar_t[x_t, k]
    Eigen::VectorXd step;     // Q_t[x_t, j] for j = 1..K+1
    Eigen::VectorXd mix;      // mixture over x_{t-1}
    Eigen::VectorXd dmix;     // dL/dmix
    double support = 0.0;
  };
  auto caches = std::make_shared<std::vector<Cache>>(n);
  Matrix out(n, 1);
  const Matrix& p = probs.value();
  for (Eigen::Index i = 0; i < n; ++i) {
    Cache& c = (*caches)[i];
    c.inv_lik.resize(k);
    c.step.resize(k + 1);
    double w_sum = 0.0;
    for (int j = 1; j <= k; ++j) {
      const double lik = sched.CumulativeProb(t, xt[i], j);
      c.inv_lik(j - 1) = lik > 0.0 ? 1.0 / lik : 0.0;
      if (lik > 0.0) c.support += p(i, j - 1);
      w_sum += p(i, j - 1) * c.inv_lik(j - 1);
    }
    for (int j = 1; j <= k + 1; ++j) c.step(j - 1) = sched.StepProb(t, xt[i], j);
    CTXTTS_CHECK(c.support > 0.0, errc::kDegeneratePosterior,
                 "denoiser puts no mass on x_0 candidates consistent with x_t");
    c.mix.resize(k + 1);
    for (int j = 1; j <= k; ++j) {
      c.mix(j - 1) =
          c.step(j - 1) * (abar * p(i, j - 1) * c.inv_lik(j - 1) + bbar * w_sum) / c.support;
    }
    c.mix(k) = c.step(k) * gbar * w_sum / c.support;

    c.dmix = Eigen::VectorXd::Zero(k + 1);
    if (t == 1) {
      const int j = x0[i];
      out(i, 0) = -std::log(c.mix(j - 1));
      c.dmix(j - 1) = -1.0 / c.mix(j - 1);
    } else {
      const Eigen::VectorXd q = diffusion::Posterior(xt[i], x0[i], t, sched);
      double kl = 0.0;
      for (int j = 0; j <= k; ++j) {
        if (q(j) <= 0.0) continue;
        kl += q(j) * (std::log(q(j)) - std::log(c.mix(j)));
        c.dmix(j) = -q(j) / c.mix(j);
      }
      out(i, 0) = kl;
    }
  }
  return Tensor::FromOp(std::move(out), {probs}, [caches, k, abar, bbar, gbar](nn::Node& self) {
    nn::Node& pp = *self.parents[0];
    if (!pp.requires_grad) return;
    Matrix grad(pp.value.rows(), k);
    for (Eigen::Index i = 0; i < pp.value.rows(); ++i) {
      const Cache& c = (*caches)[i];
      const Eigen::VectorXd g = c.dmix * self.grad(i, 0);
      double real_sum = 0.0;
      for (int j = 0; j < k; ++j) real_sum += g(j) * c.step(j);
      const double shared = bbar * real_sum + gbar * g(k) * c.step(k);
      const double gm = g.dot(c.mix);
      for (int j = 0; j < k; ++j) {
        const double consistent = c.inv_lik(j) > 0.0 ? 1.0 : 0.0;
        grad(i, j) = c.inv_lik(j) * (abar * c.step(j) * g(j) + shared) / c.support -
                     gm / c.support * consistent;
      }
    }
    pp.Accumulate(grad);
  });
}

Tensor TrainingLoss(const Txt2VecModel& model, const diffusion::TransitionSchedule& sched,
                    const TrainingExample& ex, const Segment& seg, int t,
                    std::span<const int> xt, LossBreakdown* breakdown) {
  const Txt2VecConfig& cfg = model.config();
  CTXTTS_CHECK(seg.a_len + seg.x_len + seg.b_len == ex.num_frames() && seg.x_len > 0,
               errc::kLengthMismatch, "segment does not tile the utterance");
  CTXTTS_CHECK(static_cast<int>(xt.size()) == seg.x_len, errc::kLengthMismatch,
               "x_t length differs from the data segment");

  Tensor e = model.encoder().Forward(ex.phonemes);
  Tensor log_d = model.duration().Forward(e);
  Matrix target(log_d.rows(), 1);
  for (Eigen::Index i = 0; i < target.rows(); ++i) target(i, 0) = std::log1p(ex.durations[i]);
  Tensor dur_loss = nn::Mean(nn::Square(nn::Sub(log_d, Tensor(target))));

  Tensor h = LengthRegulate(e, ex.durations);
  std::vector<int> seq(ex.tokens.begin(), ex.tokens.end());
  std::copy(xt.begin(), xt.end(), seq.begin() + seg.a_len);
  std::vector<int> indicator(seq.size(), 0);
  std::fill(indicator.begin() + seg.a_len, indicator.begin() + seg.a_len + seg.x_len, 1);
  Tensor logits = model.decoder().Forward(seq, indicator, t, h);

  std::span<const int> x0(ex.tokens.data() + seg.a_len, seg.x_len);
  Tensor probs = nn::Softmax(logits);
  Tensor vb = nn::Mean(DiffusionTerm(probs, xt, x0, t, sched));
  std::vector<int> pick(seg.x_len);
  for (int i = 0; i < seg.x_len; ++i) pick[i] = i * cfg.num_tokens + x0[i] - 1;
  Tensor ce = nn::Scale(nn::Mean(nn::GatherFlat(nn::LogSoftmax(logits), pick, seg.x_len, 1)), -1.0);
  Tensor diff = nn::Add(vb, nn::Scale(ce, cfg.aux_weight));
  Tensor total = nn::Add(dur_loss, nn::Scale(diff, cfg.gamma_loss));

  if (breakdown) {
    breakdown->total = total.item();
    breakdown->duration = dur_loss.item();
    breakdown->diffusion = vb.item();
    breakdown->aux = ce.item();
    int hits = 0;
    for (int i = 0; i < seg.x_len; ++i) {
      Eigen::Index arg;
      logits.value().row(i).maxCoeff(&arg);
      hits += (arg + 1 == x0[i]);
    }
    breakdown->accuracy = static_cast<double>(hits) / seg.x_len;
  }
  return total;
}

Tensor SampleTrainingLoss(const Txt2VecModel& model, const diffusion::TransitionSchedule& sched,
                          const TrainingExample& ex, Rng& rng, LossBreakdown* breakdown) {
  const Segment seg = SegmentForTraining(ex.num_frames(), rng, model.config());
  const int t = static_cast<int>(rng.UniformInt(1, sched.steps()));
  std::span<const int> x0(ex.tokens.data() + seg.a_len, seg.x_len);
  const diffusion::TokenSequence xt = diffusion::ForwardCorrupt(x0, t, sched, rng);
  return TrainingLoss(model, sched, ex, seg, t, xt, breakdown);
}

}  // namespace ctxtts::txt2vec
