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

#include "ctxtts/nn/optim.h"

#include <cmath>

namespace ctxtts::nn {

Adam::Adam(std::vector<Tensor> params, AdamOptions options)
    : params_(std::move(params)), options_(options) {
  for (const auto& p : params_) {
    m_.push_back(Matrix::Zero(p.rows(), p.cols()));
    v_.push_back(Matrix::Zero(p.rows(), p.cols()));
  }
}

void Adam::ZeroGrad() {
  for (auto& p : params_) p.ZeroGrad();
}

double Adam::Step() {
  double sq = 0.0;
  for (const auto& p : params_) {
    if (p.grad().size() != 0) sq += p.grad().squaredNorm();
  }
  const double norm = std::sqrt(sq);
  double clip = 1.0;
  if (options_.clip_norm > 0.0 && norm > options_.clip_norm) {
    clip = options_.clip_norm / norm;
  }

  ++steps_;
  const double bc1 = 1.0 - std::pow(options_.beta1, static_cast<double>(steps_));
  const double bc2 = 1.0 - std::pow(options_.beta2, static_cast<double>(steps_));
  for (size_t i = 0; i < params_.size(); ++i) {
    Tensor& p = params_[i];
    if (p.grad().size() == 0) continue;
    Matrix g = p.grad() * clip;
    m_[i] = options_.beta1 * m_[i] + (1.0 - options_.beta1) * g;
    v_[i] = options_.beta2 * v_[i] +
            (1.0 - options_.beta2) * g.cwiseProduct(g);
    Matrix& w = p.mutable_value();
    if (options_.weight_decay > 0.0) {
      w *= 1.0 - options_.lr * options_.weight_decay;
    }
    w.array() -= options_.lr * (m_[i].array() / bc1) /
                 ((v_[i].array() / bc2).sqrt() + options_.eps);
  }
  ZeroGrad();
  return norm;
}

}  // namespace ctxtts::nn
