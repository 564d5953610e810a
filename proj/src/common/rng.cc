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

#include "ctxtts/common/rng.h"

#include <cmath>
#include <limits>
#include <numeric>

#include "ctxtts/common/error.h"

namespace ctxtts {

int64_t Rng::UniformInt(int64_t lo, int64_t hi) {
  CTXTTS_CHECK(lo <= hi, errc::kInvalidArgument, "UniformInt: empty range");
  const auto span = static_cast<uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<int64_t>(engine_());
  // Rejection sampling keeps the draw exactly uniform.
  const uint64_t limit = std::numeric_limits<uint64_t>::max() -
                         std::numeric_limits<uint64_t>::max() % span;
  uint64_t r;
  do {
    r = engine_();
  } while (r >= limit);
  return lo + static_cast<int64_t>(r % span);
}

double Rng::Normal(double mean, double stddev) {
  // Box-Muller on our own uniform draws so results do not depend on the
  // standard library's distribution implementation.
  double u1 = Uniform();
  while (u1 <= 0.0) u1 = Uniform();
  const double u2 = Uniform();
  return mean + stddev * std::sqrt(-2.0 * std::log(u1)) *
                    std::cos(2.0 * M_PI * u2);
}

int Rng::Categorical(std::span<const double> weights) {
  CTXTTS_CHECK(!weights.empty(), errc::kInvalidArgument,
               "Categorical: no outcomes");
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  CTXTTS_CHECK(total > 0.0 && std::isfinite(total), errc::kInvalidArgument,
               "Categorical: weights must have a positive finite sum");
  const double u = Uniform() * total;
  double acc = 0.0;
  int last_positive = 0;
  for (size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last_positive = static_cast<int>(i);
    if (u < acc) return static_cast<int>(i);
  }
  return last_positive;
}

}  // namespace ctxtts
