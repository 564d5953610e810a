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

#ifndef CTXTTS_NN_LAYERS_H_
#define CTXTTS_NN_LAYERS_H_

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "ctxtts/common/rng.h"
#include "ctxtts/nn/ops.h"
#include "ctxtts/nn/tensor.h"

namespace ctxtts::nn {

using NamedTensor = std::pair<std::string, Tensor>;

// Owner of trainable parameters. Children are registered by pointer and must
// be members (or owned members) of the registering module.
class Module {
 public:
  Module() = default;
  virtual ~Module() = default;
  Module(const Module&) = delete;
  Module& operator=(const Module&) = delete;

  // Dotted, deterministic-order names.
  std::vector<NamedTensor> NamedParameters() const;
  std::vector<Tensor> Parameters() const;
  void ZeroGrad();
  Eigen::Index NumParameters() const;

 protected:
  Tensor RegisterParameter(const std::string& name, Matrix init);
  void RegisterModule(const std::string& name, Module* child);

 private:
  void Collect(const std::string& prefix, std::vector<NamedTensor>* out) const;

  std::vector<NamedTensor> params_;
  std::vector<std::pair<std::string, Module*>> children_;
};

Matrix XavierUniform(Eigen::Index fan_in, Eigen::Index fan_out, Rng& rng);
Matrix UniformInit(Eigen::Index rows, Eigen::Index cols, double bound, Rng& rng);
Matrix NormalInit(Eigen::Index rows, Eigen::Index cols, double stddev, Rng& rng);

// Fixed sinusoidal encodings, one row per position.
Matrix SinusoidalPositions(Eigen::Index length, Eigen::Index dim);

class Linear : public Module {
 public:
  Linear(int in, int out, Rng& rng, bool bias = true);
  Tensor Forward(const Tensor& x) const;
  const Tensor& weight() const { return weight_; }

 private:
  Tensor weight_;  // [in x out]
  Tensor bias_;
};

class LayerNormLayer : public Module {
 public:
  explicit LayerNormLayer(int dim);
  Tensor Forward(const Tensor& x) const;

 private:
  Tensor gamma_;
  Tensor beta_;
};

class Embedding : public Module {
 public:
  Embedding(int count, int dim, Rng& rng);
  Tensor Forward(const std::vector<int>& ids) const;
  int count() const { return static_cast<int>(table_.rows()); }

 private:
  Tensor table_;
};

struct ConvOptions {
  int kernel = 1;
  int stride = 1;
  int dilation = 1;
  // Negative means "same" padding for stride 1.
  int pad_left = -1;
  int pad_right = -1;
};

// 1-D convolution over [time x channels] via im2col.
class Conv1d : public Module {
 public:
  Conv1d(int in, int out, ConvOptions options, Rng& rng);
  Tensor Forward(const Tensor& x) const;
  const ConvOptions& options() const { return options_; }

 private:
  ConvOptions options_;
  int in_;
  Tensor weight_;  // [kernel*in x out]
  Tensor bias_;
};

class DepthwiseConv : public Module {
 public:
  DepthwiseConv(int channels, int kernel, Rng& rng);
  Tensor Forward(const Tensor& x) const;

 private:
  Tensor weight_;
  Tensor bias_;
};

enum class Activation { kRelu, kGelu, kSilu };
Tensor Activate(const Tensor& x, Activation act);

class FeedForward : public Module {
 public:
  FeedForward(int dim, int hidden, Activation act, Rng& rng);
  Tensor Forward(const Tensor& x) const;

 private:
  Activation act_;
  Linear in_;
  Linear out_;
};

// Scaled dot-product attention with `heads` heads. Queries come from one
// sequence; keys and values from another (the same one for self-attention).
// No positional information is injected here.
class MultiHeadAttention : public Module {
 public:
  MultiHeadAttention(int dim, int heads, Rng& rng, int kv_dim = -1);
  Tensor Forward(const Tensor& query, const Tensor& key_value) const;
  int heads() const { return heads_; }

 private:
  int dim_;
  int heads_;
  Linear q_;
  Linear k_;
  Linear v_;
  Linear out_;
};

}  // namespace ctxtts::nn

#endif  // CTXTTS_NN_LAYERS_H_
