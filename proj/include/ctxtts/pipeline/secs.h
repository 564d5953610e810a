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

#ifndef CTXTTS_PIPELINE_SECS_H_
#define CTXTTS_PIPELINE_SECS_H_

#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "ctxtts/audio/features.h"

namespace ctxtts::pipeline {

// Utterance-level speaker embedding.
class SpeakerEmbedder {
 public:
  virtual ~SpeakerEmbedder() = default;
  virtual std::string name() const = 0;
  // Throws Error(kEmbedder) when no embedding can be formed.
  virtual std::vector<double> Embed(std::span<const double> samples) const = 0;
};

// Per-bin mean and variance of the log-mel frames.
class MelStatsEmbedder : public SpeakerEmbedder {
 public:
  explicit MelStatsEmbedder(audio::FeatureConfig features = {});
  std::string name() const override { return "mel-mean-var"; }
  std::vector<double> Embed(std::span<const double> samples) const override;

 private:
  audio::MelExtractor mel_;
};

// Cosine similarity clamped to [-1, 1]. Throws Error(kEmbedder) on a zero
// or non-finite vector and Error(kLengthMismatch) on differing sizes.
double CosineSimilarity(std::span<const double> a, std::span<const double> b);

struct SecsPair {
  std::string reference;
  std::string generated;
  double similarity = 0.0;
};

struct SecsReport {
  std::string embedder;
  std::vector<SecsPair> pairs;
  double mean = 0.0;

  void Add(SecsPair pair);
};

double ComputeSecs(const SpeakerEmbedder& embedder, std::span<const double> reference,
                   std::span<const double> generated);

// One JSON object per pair, then a summary object:
//   {"type":"pair","reference":..,"generated":..,"secs":..}
//   {"type":"summary","schema":1,"embedder":..,"count":..,"mean":..}
std::vector<nlohmann::json> SecsReportLines(const SecsReport& report);
std::string FormatSecsReport(const SecsReport& report);

}  // namespace ctxtts::pipeline

#endif  // CTXTTS_PIPELINE_SECS_H_
