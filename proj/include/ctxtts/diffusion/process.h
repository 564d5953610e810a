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

#ifndef CTXTTS_DIFFUSION_PROCESS_H_
#define CTXTTS_DIFFUSION_PROCESS_H_

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "ctxtts/common/rng.h"
#include "ctxtts/diffusion/schedule.h"

namespace ctxtts::diffusion {

using TokenSequence = std::vector<int>;

// Samples x_t ~ q(x_t | x_0) independently per position. t = 0 returns x0.
TokenSequence ForwardCorrupt(std::span<const int> x0, int t,
                             const TransitionSchedule& sched, Rng& rng);

// Samples x_t ~ q(x_t | x_{t-1}) independently per position.
TokenSequence ForwardStep(std::span<const int> prev, int t,
                          const TransitionSchedule& sched, Rng& rng);

// q(x_{t-1} | x_t, x_0) as a length K+1 vector (entry i is token i+1), by
// Bayes' rule over Q_t and Qbar_{t-1}. Throws kDegeneratePosterior when
// q(x_t | x_0) is zero.
Eigen::VectorXd Posterior(int xt, int x0, int t, const TransitionSchedule& sched);

// p(x_{t-1} | x_t) = sum_k q(x_{t-1} | x_t, k) p(k) for one position, where
// p_x0 is a distribution over the K real tokens. Candidates k that cannot
// have produced x_t are excluded and the remaining weights renormalized.
// Runs in O(K).
Eigen::VectorXd DenoisingMixture(int xt, std::span<const double> p_x0, int t,
                                 const TransitionSchedule& sched);

// One reverse step over a sequence. p_x0 holds one row per position over the
// K real tokens. temperature rescales p_x0 as p^(1/temperature).
TokenSequence BackwardStep(std::span<const int> xt,
                           const Eigen::Ref<const Eigen::MatrixXd>& p_x0,
                           int t, const TransitionSchedule& sched, Rng& rng,
                           double temperature = 1.0);

// x_T used to start sampling: every position masked.
TokenSequence FullyMasked(size_t length, const TransitionSchedule& sched);

}  // namespace ctxtts::diffusion

#endif  // CTXTTS_DIFFUSION_PROCESS_H_
