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

#ifndef CTXTTS_DIFFUSION_SCHEDULE_H_
#define CTXTTS_DIFFUSION_SCHEDULE_H_

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace ctxtts::diffusion {

// Token alphabet: real tokens are 1..K, the mask token is K+1.
struct Codebook {
  int num_tokens = 0;

  int mask_index() const { return num_tokens + 1; }
  bool IsReal(int v) const { return v >= 1 && v <= num_tokens; }
  bool IsValid(int v) const { return v >= 1 && v <= num_tokens + 1; }
};

// Terminal cumulants of the linear schedule.
struct ScheduleParams {
  double terminal_alpha_bar = 1e-5;
  double terminal_gamma_bar = 0.9;
};

// Mask-and-uniform corruption. Per step a real token is kept with alpha,
// moved to each of the K real tokens with beta (so it stays put with
// alpha + beta), and masked with gamma. The mask token is absorbing.
class TransitionSchedule {
 public:
  // alpha_bar[t] = 1 - t (1 - a_T) / T, gamma_bar[t] = t g_T / T.
  static TransitionSchedule Linear(int steps, int num_tokens,
                                   ScheduleParams params = {});
  // Arbitrary cumulants indexed 0..T with alpha_bar[0] = 1, gamma_bar[0] = 0.
  static TransitionSchedule FromCumulants(int num_tokens,
                                          std::vector<double> alpha_bar,
                                          std::vector<double> gamma_bar);
  // Parses the key-value text written by Serialize().
  static TransitionSchedule Parse(const std::string& text);
  static TransitionSchedule Load(const std::string& path);

  int steps() const { return steps_; }
  int num_tokens() const { return codebook_.num_tokens; }
  int mask_index() const { return codebook_.mask_index(); }
  const Codebook& codebook() const { return codebook_; }
  const ScheduleParams& params() const { return params_; }

  // Per-step values for t in 1..T.
  double alpha(int t) const { return alpha_[t]; }
  double beta(int t) const { return beta_[t]; }
  double gamma(int t) const { return gamma_[t]; }
  // Cumulative values for t in 0..T.
  double alpha_bar(int t) const { return alpha_bar_[t]; }
  double beta_bar(int t) const { return beta_bar_[t]; }
  double gamma_bar(int t) const { return gamma_bar_[t]; }

  // Q_t[to, from] = q(x_t = to | x_{t-1} = from), tokens in 1..K+1.
  double StepProb(int t, int to, int from) const;
  // Qbar_t[to, from] = q(x_t = to | x_0 = from).
  double CumulativeProb(int t, int to, int from) const;

  // Dense (K+1)x(K+1) matrices, row/col i holding token i+1.
  Eigen::MatrixXd StepMatrix(int t) const;
  Eigen::MatrixXd CumulativeMatrix(int t) const;

  // "T = ..\nK = ..\na_T = ..\ng_T = .." with round-trip exact doubles.
  // Only linear schedules are serializable.
  std::string Serialize() const;
  void Save(const std::string& path) const;

  bool SameAs(const TransitionSchedule& other) const;

 private:
  TransitionSchedule() = default;
  void DeriveSteps();

  int steps_ = 0;
  Codebook codebook_;
  ScheduleParams params_;
  bool linear_ = false;
  std::vector<double> alpha_, beta_, gamma_;
  std::vector<double> alpha_bar_, beta_bar_, gamma_bar_;
};

}  // namespace ctxtts::diffusion

#endif  // CTXTTS_DIFFUSION_SCHEDULE_H_
