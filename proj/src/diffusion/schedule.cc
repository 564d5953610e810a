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

#include "ctxtts/diffusion/schedule.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "ctxtts/common/error.h"

namespace ctxtts::diffusion {

namespace {

constexpr double kProbSlack = 1e-12;

std::string FormatExact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

TransitionSchedule TransitionSchedule::Linear(int steps, int num_tokens,
                                              ScheduleParams params) {
  CTXTTS_CHECK(steps >= 1, errc::kInvalidSchedule, "schedule needs T >= 1");
  CTXTTS_CHECK(num_tokens >= 2, errc::kInvalidSchedule, "schedule needs K >= 2");
  CTXTTS_CHECK(params.terminal_alpha_bar >= 0.0 &&
                   params.terminal_alpha_bar <= 1.0 &&
                   params.terminal_gamma_bar >= 0.0 &&
                   params.terminal_gamma_bar <= 1.0 &&
                   params.terminal_alpha_bar + params.terminal_gamma_bar <=
                       1.0 + kProbSlack,
               errc::kInvalidSchedule, "terminal cumulants out of range");
  std::vector<double> abar(steps + 1), gbar(steps + 1);
  for (int t = 0; t <= steps; ++t) {
    abar[t] = 1.0 - t * (1.0 - params.terminal_alpha_bar) / steps;
    gbar[t] = t * params.terminal_gamma_bar / steps;
  }
  TransitionSchedule s = FromCumulants(num_tokens, std::move(abar), std::move(gbar));
  s.params_ = params;
  s.linear_ = true;
  return s;
}

TransitionSchedule TransitionSchedule::FromCumulants(
    int num_tokens, std::vector<double> alpha_bar,
    std::vector<double> gamma_bar) {
  CTXTTS_CHECK(num_tokens >= 2, errc::kInvalidSchedule, "schedule needs K >= 2");
  CTXTTS_CHECK(alpha_bar.size() == gamma_bar.size() && alpha_bar.size() >= 2,
               errc::kInvalidSchedule, "cumulant arrays must cover t = 0..T");
  CTXTTS_CHECK(alpha_bar[0] == 1.0 && gamma_bar[0] == 0.0,
               errc::kInvalidSchedule, "t = 0 must be the identity corruption");
  TransitionSchedule s;
  s.steps_ = static_cast<int>(alpha_bar.size()) - 1;
  s.codebook_.num_tokens = num_tokens;
  s.alpha_bar_ = std::move(alpha_bar);
  s.gamma_bar_ = std::move(gamma_bar);
  s.DeriveSteps();
  return s;
}

void TransitionSchedule::DeriveSteps() {
  const int k = codebook_.num_tokens;
  alpha_.assign(steps_ + 1, 1.0);
  gamma_.assign(steps_ + 1, 0.0);
  beta_.assign(steps_ + 1, 0.0);
  beta_bar_.assign(steps_ + 1, 0.0);
  for (int t = 0; t <= steps_; ++t) {
    beta_bar_[t] = (1.0 - alpha_bar_[t] - gamma_bar_[t]) / k;
    CTXTTS_CHECK(alpha_bar_[t] >= 0.0 && gamma_bar_[t] >= 0.0 &&
                     gamma_bar_[t] <= 1.0 && beta_bar_[t] >= -kProbSlack,
                 errc::kInvalidSchedule,
                 "cumulative probability out of [0,1] at t=" + std::to_string(t));
    if (beta_bar_[t] < 0.0) beta_bar_[t] = 0.0;
  }
  for (int t = 1; t <= steps_; ++t) {
    CTXTTS_CHECK(alpha_bar_[t - 1] > 0.0 && gamma_bar_[t - 1] < 1.0,
                 errc::kInvalidSchedule,
                 "schedule saturates before the last step at t=" +
                     std::to_string(t - 1));
    alpha_[t] = alpha_bar_[t] / alpha_bar_[t - 1];
    gamma_[t] = 1.0 - (1.0 - gamma_bar_[t]) / (1.0 - gamma_bar_[t - 1]);
    beta_[t] = (1.0 - alpha_[t] - gamma_[t]) / k;
    const bool ok = alpha_[t] >= 0.0 && alpha_[t] <= 1.0 + kProbSlack &&
                    gamma_[t] >= -kProbSlack && gamma_[t] <= 1.0 &&
                    beta_[t] >= -kProbSlack;
    CTXTTS_CHECK(ok, errc::kInvalidSchedule,
                 "per-step probability out of [0,1] at t=" + std::to_string(t));
    if (gamma_[t] < 0.0) gamma_[t] = 0.0;
    if (beta_[t] < 0.0) beta_[t] = 0.0;
  }
}

double TransitionSchedule::StepProb(int t, int to, int from) const {
  const int mask = mask_index();
  if (from == mask) return to == mask ? 1.0 : 0.0;
  if (to == mask) return gamma_[t];
  return beta_[t] + (to == from ? alpha_[t] : 0.0);
}

double TransitionSchedule::CumulativeProb(int t, int to, int from) const {
  const int mask = mask_index();
  if (from == mask) return to == mask ? 1.0 : 0.0;
  if (to == mask) return gamma_bar_[t];
  return beta_bar_[t] + (to == from ? alpha_bar_[t] : 0.0);
}

Eigen::MatrixXd TransitionSchedule::StepMatrix(int t) const {
  const int n = mask_index();
  Eigen::MatrixXd q(n, n);
  for (int to = 1; to <= n; ++to) {
    for (int from = 1; from <= n; ++from) q(to - 1, from - 1) = StepProb(t, to, from);
  }
  return q;
}

Eigen::MatrixXd TransitionSchedule::CumulativeMatrix(int t) const {
  const int n = mask_index();
  Eigen::MatrixXd q(n, n);
  for (int to = 1; to <= n; ++to) {
    for (int from = 1; from <= n; ++from) {
      q(to - 1, from - 1) = CumulativeProb(t, to, from);
    }
  }
  return q;
}

std::string TransitionSchedule::Serialize() const {
  CTXTTS_CHECK(linear_, errc::kInvalidSchedule,
               "only linear schedules have a key-value form");
  std::ostringstream out;
  out << "T = " << steps_ << "\n"
      << "K = " << codebook_.num_tokens << "\n"
      << "a_T = " << FormatExact(params_.terminal_alpha_bar) << "\n"
      << "g_T = " << FormatExact(params_.terminal_gamma_bar) << "\n";
  return out.str();
}

TransitionSchedule TransitionSchedule::Parse(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  for (const char* key : {"T", "K", "a_T", "g_T"}) {
    CTXTTS_CHECK(kv.count(key), errc::kInvalidSchedule,
                 std::string("schedule file lacks key ") + key);
  }
  try {
    ScheduleParams p;
    p.terminal_alpha_bar = std::stod(kv["a_T"]);
    p.terminal_gamma_bar = std::stod(kv["g_T"]);
    return Linear(std::stoi(kv["T"]), std::stoi(kv["K"]), p);
  } catch (const std::logic_error&) {
    throw Error(errc::kInvalidSchedule, "malformed number in schedule file");
  }
}

TransitionSchedule TransitionSchedule::Load(const std::string& path) {
  std::ifstream in(path);
  CTXTTS_CHECK(static_cast<bool>(in), errc::kIo, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return Parse(buf.str());
}

void TransitionSchedule::Save(const std::string& path) const {
  std::ofstream out(path);
  CTXTTS_CHECK(static_cast<bool>(out), errc::kIo, "cannot write " + path);
  out << Serialize();
}

bool TransitionSchedule::SameAs(const TransitionSchedule& other) const {
  return steps_ == other.steps_ &&
         codebook_.num_tokens == other.codebook_.num_tokens &&
         alpha_bar_ == other.alpha_bar_ && gamma_bar_ == other.gamma_bar_;
}

}  // namespace ctxtts::diffusion
