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

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "ctxtts/common/error.h"
#include "ctxtts/diffusion/process.h"
#include "ctxtts/diffusion/schedule.h"
#include "oracles.h"

namespace ctxtts::diffusion {
namespace {

using testing::OracleCumulative;
using testing::OraclePosterior;
using testing::OracleStep;

TransitionSchedule RandomSchedule(int k, int steps, Rng& rng) {
  std::vector<double> abar{1.0}, gbar{0.0};
  for (int t = 1; t <= steps; ++t) {
    const double a = rng.Uniform(0.5, 0.95);
    const double g = rng.Uniform(0.0, 1.0 - a);
    abar.push_back(abar.back() * a);
    gbar.push_back(1.0 - (1.0 - gbar.back()) * (1.0 - g));
  }
  return TransitionSchedule::FromCumulants(k, abar, gbar);
}

double ThreeSigma(double p, int n) { return 3.0 * std::sqrt(p * (1.0 - p) / n); }

TEST(ScheduleTest, LinearDefaultsHitTerminalCumulants) {
  const auto s = TransitionSchedule::Linear(100, 128);
  EXPECT_NEAR(s.alpha_bar(100), 1e-5, 1e-15);
  EXPECT_NEAR(s.gamma_bar(100), 0.9, 1e-15);
  EXPECT_EQ(s.alpha_bar(0), 1.0);
  EXPECT_EQ(s.gamma_bar(0), 0.0);
  for (int t = 1; t <= 100; ++t) {
    EXPECT_NEAR(s.alpha(t) + 128 * s.beta(t) + s.gamma(t), 1.0, 1e-12);
    EXPECT_GE(s.beta(t), 0.0);
  }
}

TEST(ScheduleTest, CumulantsMatchExplicitProductsForK4) {
  const auto s = TransitionSchedule::Linear(100, 4);
  double prod_alpha = 1.0, keep = 1.0;
  for (int t = 1; t <= 100; ++t) {
    prod_alpha *= s.alpha(t);
    keep *= 1.0 - s.gamma(t);
    EXPECT_NEAR(s.alpha_bar(t), prod_alpha, 1e-10);
    EXPECT_NEAR(s.gamma_bar(t), 1.0 - keep, 1e-10);
  }
  for (int t : {0, 1, 17, 50, 99, 100}) {
    const Eigen::MatrixXd explicit_q = OracleCumulative(s, t);
    EXPECT_LT((explicit_q - s.CumulativeMatrix(t)).cwiseAbs().maxCoeff(), 1e-10) << t;
    EXPECT_LT((explicit_q.colwise().sum().array() - 1.0).abs().maxCoeff(), 1e-10);
  }
}

TEST(ScheduleTest, IdentityCaseAndAbsorbingMask) {
  const auto s = TransitionSchedule::Linear(1, 2, {.terminal_alpha_bar = 1.0,
                                                   .terminal_gamma_bar = 0.0});
  EXPECT_TRUE(s.StepMatrix(1).isApprox(Eigen::MatrixXd::Identity(3, 3)));
  const auto d = TransitionSchedule::Linear(10, 5);
  for (int t = 1; t <= 10; ++t) {
    EXPECT_EQ(d.StepProb(t, d.mask_index(), d.mask_index()), 1.0);
    EXPECT_LT((d.StepMatrix(t).colwise().sum().array() - 1.0).abs().maxCoeff(), 1e-10);
  }
}

TEST(ScheduleTest, RejectsInvalidParameters) {
  EXPECT_THROW(TransitionSchedule::Linear(0, 4), Error);
  EXPECT_THROW(TransitionSchedule::Linear(10, 1), Error);
  EXPECT_THROW(TransitionSchedule::Linear(10, 4, {.terminal_alpha_bar = 0.5,
                                                  .terminal_gamma_bar = 0.9}),
               Error);
  // Cumulative gamma that decreases implies a negative per-step gamma.
  EXPECT_THROW(TransitionSchedule::FromCumulants(3, {1.0, 0.9, 0.8}, {0.0, 0.05, 0.01}),
               Error);
}

TEST(ScheduleTest, SerializationRoundTripIsBitExact) {
  const auto s = TransitionSchedule::Linear(37, 16, {.terminal_alpha_bar = 3.3e-5,
                                                     .terminal_gamma_bar = 0.87});
  const auto back = TransitionSchedule::Parse(s.Serialize());
  EXPECT_TRUE(back.SameAs(s));
  EXPECT_EQ(back.Serialize(), s.Serialize());
  EXPECT_THROW(TransitionSchedule::Parse("T = 10\nK = 4\n"), Error);
}

TEST(ForwardCorruptTest, StepZeroIsIdentity) {
  const auto s = TransitionSchedule::Linear(10, 8);
  Rng rng(3);
  const std::vector<int> x0{1, 5, 8, 2, 2};
  EXPECT_EQ(ForwardCorrupt(x0, 0, s, rng), x0);
}

TEST(ForwardCorruptTest, EmpiricalMarginalMatchesClosedForm) {
  const auto s = TransitionSchedule::FromCumulants(2, {1.0, 0.5}, {0.0, 0.3});
  ASSERT_NEAR(s.beta_bar(1), 0.1, 1e-15);
  Rng rng(11);
  const int n = 100000;
  std::vector<int> counts(3, 0);
  const std::vector<int> x0(n, 1);
  for (int v : ForwardCorrupt(x0, 1, s, rng)) ++counts[v - 1];
  const double expected[3] = {0.6, 0.1, 0.3};
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(counts[i] / static_cast<double>(n), expected[i], ThreeSigma(expected[i], n));
  }
}

TEST(ForwardCorruptTest, TerminalFullMaskingIsAbsorbing) {
  const auto s = TransitionSchedule::FromCumulants(4, {1.0, 0.5, 0.0}, {0.0, 0.4, 1.0});
  Rng rng(5);
  const std::vector<int> x0{1, 2, 3, 4, 4, 3};
  for (int v : ForwardCorrupt(x0, 2, s, rng)) EXPECT_EQ(v, s.mask_index());
}

TEST(ForwardCorruptTest, RejectsMaskInCleanData) {
  const auto s = TransitionSchedule::Linear(10, 4);
  Rng rng(1);
  const std::vector<int> bad{1, 5};
  EXPECT_THROW(ForwardCorrupt(bad, 3, s, rng), Error);
}

TEST(ForwardCorruptTest, ComposedStepsReproduceMarginal) {
  const auto s = TransitionSchedule::Linear(10, 4);
  Rng rng(21);
  const int n = 100000;
  const int t = 6;
  const int x0_val = 3;
  const std::vector<int> x0(n, x0_val);
  const auto prev = ForwardCorrupt(x0, t - 1, s, rng);
  const auto cur = ForwardStep(prev, t, s, rng);
  std::vector<double> counts(5, 0.0);
  for (int v : cur) counts[v - 1] += 1.0;
  double chi2 = 0.0;
  for (int v = 1; v <= 5; ++v) {
    const double e = n * s.CumulativeProb(t, v, x0_val);
    chi2 += (counts[v - 1] - e) * (counts[v - 1] - e) / e;
  }
  EXPECT_LT(chi2, 18.47);  // chi-square, 4 dof, p = 0.001
}

TEST(PosteriorTest, FirstStepIsPointMass) {
  const auto s = TransitionSchedule::Linear(20, 6);
  for (int xt = 1; xt <= 7; ++xt) {
    for (int x0 = 1; x0 <= 6; ++x0) {
      const auto p = Posterior(xt, x0, 1, s);
      EXPECT_NEAR(p(x0 - 1), 1.0, 1e-12);
      EXPECT_NEAR(p.sum(), 1.0, 1e-12);
    }
  }
}

TEST(PosteriorTest, MatchesBruteForceOnRandomSchedules) {
  Rng rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    const auto s = RandomSchedule(3, 4, rng);
    for (int t = 1; t <= 4; ++t) {
      for (int xt = 1; xt <= 4; ++xt) {
        for (int x0 = 1; x0 <= 3; ++x0) {
          const auto p = Posterior(xt, x0, t, s);
          EXPECT_NEAR(p.sum(), 1.0, 1e-12);
          EXPECT_LT((p - OraclePosterior(s, xt, x0, t)).cwiseAbs().maxCoeff(), 1e-10);
        }
      }
    }
  }
}

TEST(PosteriorTest, MaskedObservationSpreadsOverOffPathTokens) {
  // Off-path tokens are reachable via substitution at an earlier step, so
  // they carry gamma_t * beta_bar_{t-1} mass, not zero.
  const auto s = TransitionSchedule::Linear(100, 4);
  const auto p = Posterior(s.mask_index(), 2, 90, s);
  const auto oracle = OraclePosterior(s, s.mask_index(), 2, 90);
  EXPECT_LT((p - oracle).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_GT(p(4), p(1));
  EXPECT_GT(p(1), p(0));
  EXPECT_NEAR(p(0) / p(2), 1.0, 1e-12);
}

TEST(PosteriorTest, DegenerateDenominatorThrows) {
  const auto s = TransitionSchedule::Linear(4, 3, {.terminal_alpha_bar = 1.0,
                                                   .terminal_gamma_bar = 0.0});
  try {
    Posterior(2, 1, 2, s);
    FAIL() << "expected a degenerate posterior";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::kDegeneratePosterior);
  }
}

TEST(DenoisingMixtureTest, EqualsWeightedPosteriors) {
  Rng rng(8);
  const auto s = RandomSchedule(5, 6, rng);
  for (int t = 1; t <= 6; ++t) {
    for (int xt = 1; xt <= 6; ++xt) {
      std::vector<double> p(5);
      double sum = 0.0;
      for (double& v : p) sum += (v = rng.Uniform(0.01, 1.0));
      for (double& v : p) v /= sum;
      Eigen::VectorXd brute = Eigen::VectorXd::Zero(6);
      for (int k = 1; k <= 5; ++k) brute += p[k - 1] * OraclePosterior(s, xt, k, t);
      const auto mix = DenoisingMixture(xt, p, t, s);
      EXPECT_LT((mix - brute).cwiseAbs().maxCoeff(), 1e-10);
    }
  }
}

TEST(BackwardStepTest, OracleDenoiserRecoversData) {
  const auto s = TransitionSchedule::Linear(100, 16);
  for (uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    std::vector<int> x0(50);
    for (int& v : x0) v = static_cast<int>(rng.UniformInt(1, 16));
    Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(50, 16);
    for (int i = 0; i < 50; ++i) delta(i, x0[i] - 1) = 1.0;
    auto x = FullyMasked(50, s);
    for (int t = 100; t >= 1; --t) x = BackwardStep(x, delta, t, s, rng);
    EXPECT_EQ(x, x0) << "seed " << seed;
  }
}

TEST(BackwardStepTest, SampledDistributionMatchesMixture) {
  const auto s = TransitionSchedule::Linear(10, 3);
  const int t = 5;
  const int n = 100000;
  Rng rng(99);
  const std::vector<int> xt(n, s.mask_index());
  const Eigen::MatrixXd uniform = Eigen::MatrixXd::Constant(n, 3, 1.0 / 3.0);
  const auto out = BackwardStep(xt, uniform, t, s, rng);
  std::vector<double> counts(4, 0.0);
  for (int v : out) counts[v - 1] += 1.0;
  Eigen::VectorXd expected = Eigen::VectorXd::Zero(4);
  for (int k = 1; k <= 3; ++k) expected += OraclePosterior(s, s.mask_index(), k, t) / 3.0;
  for (int v = 0; v < 4; ++v) {
    EXPECT_NEAR(counts[v] / n, expected(v), ThreeSigma(expected(v), n) + 1e-12);
  }
}

TEST(BackwardStepTest, LastStepNeverEmitsMask) {
  const auto s = TransitionSchedule::Linear(100, 8);
  Rng rng(2);
  Eigen::MatrixXd p = Eigen::MatrixXd::Constant(40, 8, 1.0 / 8.0);
  std::vector<int> xt(40);
  for (int i = 0; i < 40; ++i) xt[i] = i % 2 ? s.mask_index() : 1 + i % 8;
  for (int v : BackwardStep(xt, p, 1, s, rng)) EXPECT_NE(v, s.mask_index());
}

TEST(BackwardStepTest, RejectsLengthMismatch) {
  const auto s = TransitionSchedule::Linear(10, 4);
  Rng rng(1);
  const std::vector<int> xt(3, s.mask_index());
  const Eigen::MatrixXd p = Eigen::MatrixXd::Constant(2, 4, 0.25);
  try {
    BackwardStep(xt, p, 3, s, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::kLengthMismatch);
  }
}

}  // namespace
}  // namespace ctxtts::diffusion
