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

// Independent diffusion oracles shared by the unit and acceptance tests.

#ifndef CTXTTS_TESTS_ORACLES_H_
#define CTXTTS_TESTS_ORACLES_H_

#include <Eigen/Dense>

#include "ctxtts/diffusion/schedule.h"

namespace ctxtts::testing {

// Q_t written out entrywise from the per-step scalars, independent of the
// schedule's own matrix helpers.
inline Eigen::MatrixXd OracleStep(const diffusion::TransitionSchedule& s, int t) {
  const int k = s.num_tokens();
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(k + 1, k + 1);
  for (int from = 0; from < k; ++from) {
    for (int to = 0; to < k; ++to) q(to, from) = s.beta(t);
    q(from, from) += s.alpha(t);
    q(k, from) = s.gamma(t);
  }
  q(k, k) = 1.0;
  return q;
}

inline Eigen::MatrixXd OracleCumulative(const diffusion::TransitionSchedule& s, int t) {
  Eigen::MatrixXd q = Eigen::MatrixXd::Identity(s.num_tokens() + 1, s.num_tokens() + 1);
  for (int i = 1; i <= t; ++i) q = OracleStep(s, i) * q;
  return q;
}

// Bayes by enumeration over every candidate x_{t-1}, given Q_t and
// Qbar_{t-1}.
inline Eigen::VectorXd OraclePosterior(const Eigen::MatrixXd& step, const Eigen::MatrixXd& prev,
                                       int xt, int x0) {
  Eigen::VectorXd joint(step.rows());
  for (Eigen::Index c = 0; c < step.rows(); ++c) joint(c) = step(xt - 1, c) * prev(c, x0 - 1);
  return joint / joint.sum();
}

inline Eigen::VectorXd OraclePosterior(const diffusion::TransitionSchedule& s, int xt, int x0,
                                       int t) {
  return OraclePosterior(OracleStep(s, t), OracleCumulative(s, t - 1), xt, x0);
}

}  // namespace ctxtts::testing

#endif  // CTXTTS_TESTS_ORACLES_H_
