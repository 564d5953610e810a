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

#include "ctxtts/pipeline/secs.h"

#include <algorithm>
#include <cmath>

#include "ctxtts/common/error.h"

namespace ctxtts::pipeline {

MelStatsEmbedder::MelStatsEmbedder(audio::FeatureConfig features) : mel_(features) {}

std::vector<double> MelStatsEmbedder::Embed(std::span<const double> samples) const {
  CTXTTS_CHECK(!samples.empty(), errc::kEmbedder, "cannot embed empty audio");
  const nn::Matrix frames = mel_.Compute(samples).frames;
  const Eigen::RowVectorXd mean = frames.colwise().mean();
  const Eigen::RowVectorXd var =
      (frames.rowwise() - mean).array().square().colwise().mean().matrix();
  std::vector<double> out(mean.data(), mean.data() + mean.size());
  out.insert(out.end(), var.data(), var.data() + var.size());
  return out;
}

double CosineSimilarity(std::span<const double> a, std::span<const double> b) {
  CTXTTS_CHECK(a.size() == b.size(), errc::kLengthMismatch, "embedding sizes differ");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  CTXTTS_CHECK(std::isfinite(dot) && na > 0.0 && nb > 0.0 && std::isfinite(na * nb),
               errc::kEmbedder, "embedding is zero or not finite");
  return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

void SecsReport::Add(SecsPair pair) {
  pairs.push_back(std::move(pair));
  double sum = 0.0;
  for (const auto& p : pairs) sum += p.similarity;
  mean = sum / static_cast<double>(pairs.size());
}

double ComputeSecs(const SpeakerEmbedder& embedder, std::span<const double> reference,
                   std::span<const double> generated) {
  const auto a = embedder.Embed(reference);
  const auto b = embedder.Embed(generated);
  return CosineSimilarity(a, b);
}

std::vector<nlohmann::json> SecsReportLines(const SecsReport& report) {
  std::vector<nlohmann::json> lines;
  for (const auto& p : report.pairs) {
    lines.push_back({{"type", "pair"},
                     {"reference", p.reference},
                     {"generated", p.generated},
                     {"secs", p.similarity}});
  }
  lines.push_back({{"type", "summary"},
                   {"schema", 1},
                   {"embedder", report.embedder},
                   {"count", report.pairs.size()},
                   {"mean", report.mean}});
  return lines;
}

std::string FormatSecsReport(const SecsReport& report) {
  std::string out;
  for (const auto& line : SecsReportLines(report)) out += line.dump() + "\n";
  return out;
}

}  // namespace ctxtts::pipeline
