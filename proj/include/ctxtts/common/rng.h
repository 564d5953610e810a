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

#ifndef CTXTTS_COMMON_RNG_H_
#define CTXTTS_COMMON_RNG_H_

#include <cstdint>
#include <random>
#include <span>

namespace ctxtts {

// Seeded random stream. Child streams are derived deterministically so that
// a single root seed fixes every stochastic decision in a run.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0) : seed_(seed), engine_(Mix(seed)) {}

  uint64_t seed() const { return seed_; }

  // Uniform in [0, 1).
  double Uniform() { return std::generate_canonical<double, 53>(engine_); }
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  // Uniform integer in the closed range [lo, hi].
  int64_t UniformInt(int64_t lo, int64_t hi);
  double Normal(double mean = 0.0, double stddev = 1.0);
  bool Bernoulli(double p) { return Uniform() < p; }

  // Draws an index with probability proportional to weights[i]. The weights
  // need not be normalized but must have a positive sum.
  int Categorical(std::span<const double> weights);

  // Independent child stream; successive calls give distinct streams.
  Rng Split() { return Rng(Mix(engine_() ^ 0x9e3779b97f4a7c15ULL)); }
  // Child stream keyed by an integer, independent of draw history.
  Rng Child(uint64_t key) const { return Rng(Mix(seed_ * 0x100000001b3ULL + key + 1)); }

  std::mt19937_64& engine() { return engine_; }

 private:
  static uint64_t Mix(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace ctxtts

#endif  // CTXTTS_COMMON_RNG_H_
