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

#include "ctxtts/diffusion/process.h"

#include <cmath>
#include <string>

#include "ctxtts/common/error.h"

namespace ctxtts::diffusion {

namespace {

void CheckStep(int t, int lo, const TransitionSchedule& sched) {
  CTXTTS_CHECK(t >= lo && t <= sched.steps(), errc::kInvalidArgument,
               "diffusion step " + std::to_string(t) + " out of range");
}

}  // namespace

TokenSequence ForwardCorrupt(std::span<const int> x0, int t,
                             const TransitionSchedule& sched, Rng& rng) {
  CheckStep(t, 0, sched);
  const Codebook& cb = sched.codebook();
  const double gbar = sched.gamma_bar(t);
  const double abar = sched.alpha_bar(t);
  TokenSequence out(x0.begin(), x0.end());
  if (t == 0) return out;
  for (int& v : out) {
    CTXTTS_CHECK(cb.IsReal(v), errc::kInvalidArgument,
                 "clean sequences must not contain the mask token");
    // Remaining mass K * beta_bar is spread uniformly over real tokens.
    const double u = rng.Uniform();
    if (u < gbar) {
      v = cb.mask_index();
    } else if (u >= gbar + abar) {
      v = static_cast<int>(rng.UniformInt(1, cb.num_tokens));
    }
  }
  return out;
}

TokenSequence ForwardStep(std::span<const int> prev, int t,
                          const TransitionSchedule& sched, Rng& rng) {
  CheckStep(t, 1, sched);
  const Codebook& cb = sched.codebook();
  TokenSequence out(prev.begin(), prev.end());
  for (int& v : out) {
    if (v == cb.mask_index()) continue;
    const double u = rng.Uniform();
    if (u < sched.gamma(t)) {
      v = cb.mask_index();
    } else if (u >= sched.gamma(t) + sched.alpha(t)) {
      v = static_cast<int>(rng.UniformInt(1, cb.num_tokens));
    }
  }
  return out;
}

Eigen::VectorXd Posterior(int xt, int x0, int t, const TransitionSchedule& sched) {
  CheckStep(t, 1, sched);
  const Codebook& cb = sched.codebook();
  CTXTTS_CHECK(cb.IsValid(xt) && cb.IsReal(x0), errc::kInvalidArgument,
               "posterior needs a valid x_t and a real x_0");
  const double denom = sched.CumulativeProb(t, xt, x0);
  CTXTTS_CHECK(denom > 0.0, errc::kDegeneratePosterior,
               "q(x_t|x_0) is zero for x_t=" + std::to_string(xt) +
                   ", x_0=" + std::to_string(x0) + ", t=" + std::to_string(t));
  const int n = cb.mask_index();
  Eigen::VectorXd post(n);
  for (int prev = 1; prev <= n; ++prev) {
    post(prev - 1) = sched.StepProb(t, xt, prev) *
                     sched.CumulativeProb(t - 1, prev, x0) / denom;
  }
  return post;
}

Eigen::VectorXd DenoisingMixture(int xt, std::span<const double> p_x0, int t,
                                 const TransitionSchedule& sched) {
  CheckStep(t, 1, sched);
  const Codebook& cb = sched.codebook();
  const int k = cb.num_tokens;
  CTXTTS_CHECK(static_cast<int>(p_x0.size()) == k, errc::kLengthMismatch,
               "denoiser distribution must cover the K real tokens");
  CTXTTS_CHECK(cb.IsValid(xt), errc::kInvalidArgument, "invalid x_t token");

  // w_j = p_j / q(x_t | x_0 = j) over consistent candidates.
  Eigen::VectorXd w(k);
  double support = 0.0;
  for (int j = 1; j <= k; ++j) {
    const double lik = sched.CumulativeProb(t, xt, j);
    if (lik > 0.0 && p_x0[j - 1] > 0.0) {
      w(j - 1) = p_x0[j - 1] / lik;
      support += p_x0[j - 1];
    } else {
      w(j - 1) = 0.0;
    }
  }
  CTXTTS_CHECK(support > 0.0, errc::kDegeneratePosterior,
               "denoiser puts no mass on any x_0 consistent with x_t=" +
                   std::to_string(xt));
  const double w_sum = w.sum();
  const double abar_prev = sched.alpha_bar(t - 1);
  const double bbar_prev = sched.beta_bar(t - 1);
  const double gbar_prev = sched.gamma_bar(t - 1);

  Eigen::VectorXd out(k + 1);
  for (int j = 1; j <= k; ++j) {
    // sum_x0 Qbar_{t-1}[j, x0] w_x0
    const double prior = abar_prev * w(j - 1) + bbar_prev * w_sum;
    out(j - 1) = sched.StepProb(t, xt, j) * prior;
  }
  out(k) = sched.StepProb(t, xt, cb.mask_index()) * gbar_prev * w_sum;
  out /= support;
  return out;
}

TokenSequence BackwardStep(std::span<const int> xt,
                           const Eigen::Ref<const Eigen::MatrixXd>& p_x0,
                           int t, const TransitionSchedule& sched, Rng& rng,
                           double temperature) {
  CheckStep(t, 1, sched);
  CTXTTS_CHECK(static_cast<Eigen::Index>(xt.size()) == p_x0.rows(),
               errc::kLengthMismatch,
               "x_t has " + std::to_string(xt.size()) +
                   " positions but the denoiser gave " +
                   std::to_string(p_x0.rows()));
  CTXTTS_CHECK(p_x0.cols() == sched.num_tokens(), errc::kLengthMismatch,
               "denoiser rows must cover the K real tokens");
  CTXTTS_CHECK(temperature > 0.0, errc::kInvalidArgument,
               "temperature must be positive");
  TokenSequence out(xt.size());
  std::vector<double> row(p_x0.cols());
  for (size_t i = 0; i < xt.size(); ++i) {
    const double mass = p_x0.row(static_cast<Eigen::Index>(i)).sum();
    CTXTTS_CHECK(std::abs(mass - 1.0) <= 1e-6, errc::kInvalidArgument,
                 "denoiser row " + std::to_string(i) + " sums to " +
                     std::to_string(mass));
    for (Eigen::Index j = 0; j < p_x0.cols(); ++j) {
      const double p = p_x0(static_cast<Eigen::Index>(i), j);
      row[j] = temperature == 1.0 ? p : std::pow(p, 1.0 / temperature);
    }
    const Eigen::VectorXd mix = DenoisingMixture(xt[i], row, t, sched);
    out[i] = rng.Categorical(std::span<const double>(mix.data(), mix.size())) + 1;
  }
  return out;
}

TokenSequence FullyMasked(size_t length, const TransitionSchedule& sched) {
  return TokenSequence(length, sched.mask_index());
}

}  // namespace ctxtts::diffusion
