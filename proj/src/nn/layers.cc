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

#include "ctxtts/nn/layers.h"

#include <cmath>

#include "ctxtts/common/error.h"

namespace ctxtts::nn {

std::vector<NamedTensor> Module::NamedParameters() const {
  std::vector<NamedTensor> out;
  Collect("", &out);
  return out;
}

std::vector<Tensor> Module::Parameters() const {
  std::vector<Tensor> out;
  for (auto& [name, t] : NamedParameters()) out.push_back(t);
  return out;
}

void Module::ZeroGrad() {
  for (auto& t : Parameters()) t.ZeroGrad();
}

Eigen::Index Module::NumParameters() const {
  Eigen::Index n = 0;
  for (const auto& t : Parameters()) n += t.value().size();
  return n;
}

Tensor Module::RegisterParameter(const std::string& name, Matrix init) {
  Tensor t(std::move(init), /*requires_grad=*/true);
  params_.emplace_back(name, t);
  return t;
}

void Module::RegisterModule(const std::string& name, Module* child) {
  children_.emplace_back(name, child);
}

void Module::Collect(const std::string& prefix,
                     std::vector<NamedTensor>* out) const {
  for (const auto& [name, t] : params_) out->emplace_back(prefix + name, t);
  for (const auto& [name, child] : children_) {
    child->Collect(prefix + name + ".", out);
  }
}

Matrix UniformInit(Eigen::Index rows, Eigen::Index cols, double bound,
                   Rng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    m.data()[i] = rng.Uniform(-bound, bound);
  }
  return m;
}

Matrix XavierUniform(Eigen::Index fan_in, Eigen::Index fan_out, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  return UniformInit(fan_in, fan_out, bound, rng);
}

Matrix NormalInit(Eigen::Index rows, Eigen::Index cols, double stddev,
                  Rng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    m.data()[i] = rng.Normal(0.0, stddev);
  }
  return m;
}

Matrix SinusoidalPositions(Eigen::Index length, Eigen::Index dim) {
  Matrix pe(length, dim);
  for (Eigen::Index pos = 0; pos < length; ++pos) {
    for (Eigen::Index i = 0; i < dim; ++i) {
      const double rate =
          std::pow(10000.0, -2.0 * static_cast<double>(i / 2) / dim);
      const double angle = static_cast<double>(pos) * rate;
      pe(pos, i) = (i % 2 == 0) ? std::sin(angle) : std::cos(angle);
    }
  }
  return pe;
}

Linear::Linear(int in, int out, Rng& rng, bool bias) {
  weight_ = RegisterParameter("weight", XavierUniform(in, out, rng));
  if (bias) bias_ = RegisterParameter("bias", Matrix::Zero(1, out));
}

Tensor Linear::Forward(const Tensor& x) const {
  Tensor y = MatMul(x, weight_);
  return bias_.defined() ? AddRow(y, bias_) : y;
}

LayerNormLayer::LayerNormLayer(int dim) {
  gamma_ = RegisterParameter("gamma", Matrix::Ones(1, dim));
  beta_ = RegisterParameter("beta", Matrix::Zero(1, dim));
}

Tensor LayerNormLayer::Forward(const Tensor& x) const {
  return LayerNorm(x, gamma_, beta_);
}

Embedding::Embedding(int count, int dim, Rng& rng) {
  table_ = RegisterParameter("table",
                             NormalInit(count, dim, 1.0 / std::sqrt(dim), rng));
}

Tensor Embedding::Forward(const std::vector<int>& ids) const {
  for (int id : ids) {
    CTXTTS_CHECK(id >= 0 && id < table_.rows(), errc::kInvalidArgument,
                 "Embedding: id " + std::to_string(id) + " out of range");
  }
  return GatherRows(table_, ids);
}

Conv1d::Conv1d(int in, int out, ConvOptions options, Rng& rng)
    : options_(options), in_(in) {
  if (options_.pad_left < 0 || options_.pad_right < 0) {
    const int total = options_.dilation * (options_.kernel - 1);
    options_.pad_left = total / 2;
    options_.pad_right = total - total / 2;
  }
  const double bound = 1.0 / std::sqrt(static_cast<double>(in * options_.kernel));
  weight_ = RegisterParameter(
      "weight", UniformInit(static_cast<Eigen::Index>(options_.kernel) * in, out,
                            bound, rng));
  bias_ = RegisterParameter("bias", UniformInit(1, out, bound, rng));
}

Tensor Conv1d::Forward(const Tensor& x) const {
  CTXTTS_CHECK(x.cols() == in_, errc::kLengthMismatch,
               "Conv1d: channel mismatch");
  Tensor cols = options_.kernel == 1 && options_.stride == 1 &&
                        options_.pad_left == 0 && options_.pad_right == 0
                    ? x
                    : Unfold(x, options_.kernel, options_.stride,
                             options_.dilation, options_.pad_left,
                             options_.pad_right);
  return AddRow(MatMul(cols, weight_), bias_);
}

DepthwiseConv::DepthwiseConv(int channels, int kernel, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(kernel));
  weight_ = RegisterParameter("weight", UniformInit(kernel, channels, bound, rng));
  bias_ = RegisterParameter("bias", Matrix::Zero(1, channels));
}

Tensor DepthwiseConv::Forward(const Tensor& x) const {
  return DepthwiseConv1d(x, weight_, bias_);
}

Tensor Activate(const Tensor& x, Activation act) {
  switch (act) {
    case Activation::kRelu:
      return Relu(x);
    case Activation::kGelu:
      return Gelu(x);
    case Activation::kSilu:
      return Silu(x);
  }
  return x;
}

FeedForward::FeedForward(int dim, int hidden, Activation act, Rng& rng)
    : act_(act), in_(dim, hidden, rng), out_(hidden, dim, rng) {
  RegisterModule("in", &in_);
  RegisterModule("out", &out_);
}

Tensor FeedForward::Forward(const Tensor& x) const {
  return out_.Forward(Activate(in_.Forward(x), act_));
}

MultiHeadAttention::MultiHeadAttention(int dim, int heads, Rng& rng, int kv_dim)
    : dim_(dim),
      heads_(heads),
      q_(dim, dim, rng),
      k_(kv_dim < 0 ? dim : kv_dim, dim, rng),
      v_(kv_dim < 0 ? dim : kv_dim, dim, rng),
      out_(dim, dim, rng) {
  CTXTTS_CHECK(heads > 0 && dim % heads == 0, errc::kInvalidConfig,
               "attention width must be divisible by the head count");
  RegisterModule("q", &q_);
  RegisterModule("k", &k_);
  RegisterModule("v", &v_);
  RegisterModule("out", &out_);
}

Tensor MultiHeadAttention::Forward(const Tensor& query,
                                   const Tensor& key_value) const {
  const int head_dim = dim_ / heads_;
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));
  Tensor q = q_.Forward(query);
  Tensor k = k_.Forward(key_value);
  Tensor v = v_.Forward(key_value);
  std::vector<Tensor> heads;
  heads.reserve(heads_);
  for (int h = 0; h < heads_; ++h) {
    Tensor qh = SliceCols(q, h * head_dim, head_dim);
    Tensor kh = SliceCols(k, h * head_dim, head_dim);
    Tensor vh = SliceCols(v, h * head_dim, head_dim);
    Tensor weights = Softmax(Scale(MatMul(qh, Transpose(kh)), scale));
    heads.push_back(MatMul(weights, vh));
  }
  Tensor joined = heads_ == 1 ? heads.front() : ConcatCols(heads);
  return out_.Forward(joined);
}

}  // namespace ctxtts::nn
