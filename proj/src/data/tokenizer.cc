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

#include "ctxtts/data/tokenizer.h"

#include <cmath>
#include <fstream>
#include <limits>

#include "ctxtts/common/error.h"

namespace ctxtts::data {

using nlohmann::json;

void to_json(json& j, const TokenizerSpec& s) {
  j = {{"kind", s.kind == TokenizerSpec::Kind::kKMeans ? "kmeans" : "external"},
       {"num_tokens", s.num_tokens},
       {"features", s.features},
       {"num_ceps", s.num_ceps},
       {"max_iterations", s.max_iterations},
       {"tolerance", s.tolerance}};
}

void from_json(const json& j, TokenizerSpec& s) {
  TokenizerSpec d;
  const std::string kind = j.value("kind", std::string("kmeans"));
  CTXTTS_CHECK(kind == "kmeans" || kind == "external", errc::kInvalidConfig,
               "unknown tokenizer kind " + kind);
  s.kind = kind == "kmeans" ? TokenizerSpec::Kind::kKMeans : TokenizerSpec::Kind::kExternal;
  s.num_tokens = j.value("num_tokens", d.num_tokens);
  s.features = j.contains("features") ? j.at("features").get<audio::FeatureConfig>()
                                      : d.features;
  s.num_ceps = j.value("num_ceps", d.num_ceps);
  s.max_iterations = j.value("max_iterations", d.max_iterations);
  s.tolerance = j.value("tolerance", d.tolerance);
}

KMeansTokenizer::KMeansTokenizer(TokenizerSpec spec)
    : spec_(spec), mel_(spec.features) {
  CTXTTS_CHECK(spec_.num_tokens >= 1, errc::kInvalidConfig, "tokenizer needs K >= 1");
  const int mels = spec_.features.num_mels;
  CTXTTS_CHECK(spec_.num_ceps >= 0 && spec_.num_ceps < mels, errc::kInvalidConfig,
               "num_ceps must be in [0, num_mels)");
  if (spec_.num_ceps > 0) {
    dct_.resize(mels, spec_.num_ceps);
    for (int m = 0; m < mels; ++m) {
      for (int c = 0; c < spec_.num_ceps; ++c) {
        dct_(m, c) = std::sqrt(2.0 / mels) * std::cos(M_PI * (c + 1) * (m + 0.5) / mels);
      }
    }
  }
}

nn::Matrix KMeansTokenizer::FeaturesFromMel(const nn::Matrix& log_mel) const {
  return spec_.num_ceps > 0 ? nn::Matrix(log_mel * dct_) : log_mel;
}

nn::Matrix KMeansTokenizer::Features(std::span<const double> samples) const {
  return FeaturesFromMel(mel_.Compute(samples).frames);
}

namespace {

// Squared distance of each row to its nearest centroid.
void Nearest(const nn::Matrix& x, const nn::Matrix& c, std::vector<int>* label,
             std::vector<double>* dist) {
  label->assign(x.rows(), 0);
  dist->assign(x.rows(), 0.0);
  const Eigen::VectorXd cn = c.rowwise().squaredNorm();
  const nn::Matrix cross = x * c.transpose();
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double xn = x.row(i).squaredNorm();
    double best = std::numeric_limits<double>::infinity();
    int arg = 0;
    for (Eigen::Index k = 0; k < c.rows(); ++k) {
      const double d = xn - 2.0 * cross(i, k) + cn(k);
      if (d < best) {
        best = d;
        arg = static_cast<int>(k);
      }
    }
    (*label)[i] = arg;
    (*dist)[i] = std::max(0.0, best);
  }
}

}  // namespace

std::vector<double> KMeansTokenizer::Fit(const std::vector<nn::Matrix>& features, Rng& rng) {
  Eigen::Index rows = 0, dim = -1;
  for (const nn::Matrix& f : features) {
    CTXTTS_CHECK(dim < 0 || f.cols() == dim, errc::kInvalidArgument,
                 "feature dimension mismatch");
    dim = f.cols();
    rows += f.rows();
  }
  const int k = spec_.num_tokens;
  CTXTTS_CHECK(rows >= k, errc::kInvalidArgument, "fewer frames than clusters");
  nn::Matrix x(rows, dim);
  Eigen::Index at = 0;
  for (const nn::Matrix& f : features) {
    x.middleRows(at, f.rows()) = f;
    at += f.rows();
  }

  // k-means++ seeding.
  nn::Matrix c(k, dim);
  c.row(0) = x.row(rng.UniformInt(0, rows - 1));
  std::vector<double> d2(rows);
  for (Eigen::Index i = 0; i < rows; ++i) d2[i] = (x.row(i) - c.row(0)).squaredNorm();
  for (int j = 1; j < k; ++j) {
    double total = 0.0;
    for (double v : d2) total += v;
    const Eigen::Index pick = total > 0.0 ? rng.Categorical(d2) : rng.UniformInt(0, rows - 1);
    c.row(j) = x.row(pick);
    for (Eigen::Index i = 0; i < rows; ++i) {
      d2[i] = std::min(d2[i], (x.row(i) - c.row(j)).squaredNorm());
    }
  }

  std::vector<double> history;
  std::vector<int> label;
  std::vector<double> dist;
  for (int it = 0; it < spec_.max_iterations; ++it) {
    Nearest(x, c, &label, &dist);
    nn::Matrix sum = nn::Matrix::Zero(k, dim);
    std::vector<int> count(k, 0);
    for (Eigen::Index i = 0; i < rows; ++i) {
      sum.row(label[i]) += x.row(i);
      ++count[label[i]];
    }
    // Empty clusters keep their centroid, so the update cannot raise the
    // inertia.
    for (int j = 0; j < k; ++j) {
      if (count[j] > 0) c.row(j) = sum.row(j) / count[j];
    }
    Nearest(x, c, &label, &dist);
    double inertia = 0.0;
    for (double v : dist) inertia += v;
    history.push_back(inertia);
    if (history.size() >= 2) {
      const double prev = history[history.size() - 2];
      if (prev - inertia <= spec_.tolerance * prev) break;
    }
  }
  centroids_ = c;
  return history;
}

std::vector<int> KMeansTokenizer::Assign(const nn::Matrix& features) const {
  CTXTTS_CHECK(trained(), errc::kUntrained, "tokenizer has no centroids");
  CTXTTS_CHECK(features.cols() == centroids_.cols(), errc::kInvalidArgument,
               "feature dimension does not match centroids");
  std::vector<int> label;
  std::vector<double> dist;
  Nearest(features, centroids_, &label, &dist);
  return label;
}

std::vector<int> KMeansTokenizer::Tokenize(std::span<const double> samples) const {
  CTXTTS_CHECK(trained(), errc::kUntrained, "tokenizer has no centroids");
  return Assign(Features(samples));
}

void KMeansTokenizer::Save(const std::string& path) const {
  CTXTTS_CHECK(trained(), errc::kUntrained, "tokenizer has no centroids");
  json j = {{"spec", spec_}, {"rows", centroids_.rows()}, {"cols", centroids_.cols()}};
  j["centroids"] = std::vector<double>(centroids_.data(), centroids_.data() + centroids_.size());
  std::ofstream out(path);
  CTXTTS_CHECK(out.good(), errc::kIo, "cannot write tokenizer " + path);
  out << j.dump() << '\n';
}

KMeansTokenizer KMeansTokenizer::Load(const std::string& path) {
  std::ifstream in(path);
  CTXTTS_CHECK(in.good(), errc::kIo, "cannot open tokenizer " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const std::exception& e) {
    throw Error(errc::kIo, "malformed tokenizer file " + path + ": " + e.what());
  }
  KMeansTokenizer tok(j.at("spec").get<TokenizerSpec>());
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto values = j.at("centroids").get<std::vector<double>>();
  CTXTTS_CHECK(static_cast<Eigen::Index>(values.size()) == rows * cols &&
                   rows == tok.spec_.num_tokens,
               errc::kIo, "tokenizer centroid shape mismatch");
  tok.centroids_ = Eigen::Map<const nn::Matrix>(values.data(), rows, cols);
  return tok;
}

}  // namespace ctxtts::data
