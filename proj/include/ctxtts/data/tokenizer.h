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

#ifndef CTXTTS_DATA_TOKENIZER_H_
#define CTXTTS_DATA_TOKENIZER_H_

#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "ctxtts/audio/features.h"
#include "ctxtts/common/rng.h"
#include "ctxtts/nn/tensor.h"

namespace ctxtts::data {

struct TokenizerSpec {
  enum class Kind { kExternal, kKMeans };

  Kind kind = Kind::kKMeans;
  int num_tokens = 16;
  audio::FeatureConfig features;
  // Number of cepstral coefficients (DCT of the log-mel frame, skipping the
  // level term) used for clustering. Zero clusters the raw log-mel frame.
  int num_ceps = 12;
  int max_iterations = 100;
  double tolerance = 1e-7;  // relative inertia improvement to stop at
};

void to_json(nlohmann::json& j, const TokenizerSpec& s);
void from_json(const nlohmann::json& j, TokenizerSpec& s);

// Frame-level k-means quantizer. Tokens are 0-based ids in [0, K).
class KMeansTokenizer {
 public:
  explicit KMeansTokenizer(TokenizerSpec spec);

  const TokenizerSpec& spec() const { return spec_; }
  bool trained() const { return centroids_.rows() > 0; }
  const nn::Matrix& centroids() const { return centroids_; }

  // One feature row per frame.
  nn::Matrix Features(std::span<const double> samples) const;
  nn::Matrix FeaturesFromMel(const nn::Matrix& log_mel) const;

  // k-means++ seeding followed by Lloyd iterations over the stacked
  // frames. Returns the inertia after every iteration, which never
  // increases.
  std::vector<double> Fit(const std::vector<nn::Matrix>& features, Rng& rng);

  // Throws Error(kUntrained) before Fit or Load.
  std::vector<int> Assign(const nn::Matrix& features) const;
  std::vector<int> Tokenize(std::span<const double> samples) const;

  void Save(const std::string& path) const;
  static KMeansTokenizer Load(const std::string& path);

 private:
  TokenizerSpec spec_;
  audio::MelExtractor mel_;
  nn::Matrix dct_;  // [num_mels x num_ceps]
  nn::Matrix centroids_;  // [K x dim]
};

}  // namespace ctxtts::data

#endif  // CTXTTS_DATA_TOKENIZER_H_
