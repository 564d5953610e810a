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

#include "ctxtts/vec2wav/model.h"

#include <cmath>
#include <string>

#include "ctxtts/common/error.h"

namespace ctxtts::vec2wav {

using nn::Matrix;
using nn::Tensor;

namespace {

constexpr double kSlope = 0.1;

nn::ConvOptions Kernel(int kernel, int dilation = 1) {
  nn::ConvOptions o;
  o.kernel = kernel;
  o.dilation = dilation;
  return o;
}

}  // namespace

MelEncoder::MelEncoder(const Vec2WavConfig& config, Rng& rng)
    : conv_(config.features.num_mels, config.mel_channels, Kernel(config.mel_kernel), rng) {
  RegisterModule("conv", &conv_);
}

Tensor MelEncoder::Forward(const Matrix& mel) const { return conv_.Forward(Tensor(mel)); }

ConformerBlock::ConformerBlock(const Vec2WavConfig& c, Rng& rng)
    : ffn1_norm_(c.d_model),
      ffn1_(c.d_model, c.ffn_dim, nn::Activation::kSilu, rng),
      self_norm_(c.d_model),
      self_attn_(c.d_model, c.heads, rng),
      cross_norm_(c.d_model),
      cross_attn_(c.d_model, c.heads, rng, c.mel_channels),
      conv_norm_(c.d_model),
      conv_in_(c.d_model, 2 * c.d_model, rng),
      depthwise_(c.d_model, c.conv_kernel, rng),
      conv_mid_norm_(c.d_model),
      conv_out_(c.d_model, c.d_model, rng),
      ffn2_norm_(c.d_model),
      ffn2_(c.d_model, c.ffn_dim, nn::Activation::kSilu, rng),
      final_norm_(c.d_model) {
  RegisterModule("ffn1_norm", &ffn1_norm_);
  RegisterModule("ffn1", &ffn1_);
  RegisterModule("self_norm", &self_norm_);
  RegisterModule("self_attn", &self_attn_);
  RegisterModule("cross_norm", &cross_norm_);
  RegisterModule("cross_attn", &cross_attn_);
  RegisterModule("conv_norm", &conv_norm_);
  RegisterModule("conv_in", &conv_in_);
  RegisterModule("depthwise", &depthwise_);
  RegisterModule("conv_mid_norm", &conv_mid_norm_);
  RegisterModule("conv_out", &conv_out_);
  RegisterModule("ffn2_norm", &ffn2_norm_);
  RegisterModule("ffn2", &ffn2_);
  RegisterModule("final_norm", &final_norm_);
}

Tensor ConformerBlock::Forward(const Tensor& x, const Tensor& memory) const {
  Tensor y = nn::Add(x, nn::Scale(ffn1_.Forward(ffn1_norm_.Forward(x)), 0.5));
  Tensor n = self_norm_.Forward(y);
  y = nn::Add(y, self_attn_.Forward(n, n));
  y = nn::Add(y, cross_attn_.Forward(cross_norm_.Forward(y), memory));
  Tensor g = conv_in_.Forward(conv_norm_.Forward(y));
  const Eigen::Index d = g.cols() / 2;
  Tensor glu = nn::Mul(nn::SliceCols(g, 0, d), nn::Sigmoid(nn::SliceCols(g, d, d)));
  Tensor conv = nn::Silu(conv_mid_norm_.Forward(depthwise_.Forward(glu)));
  y = nn::Add(y, conv_out_.Forward(conv));
  y = nn::Add(y, nn::Scale(ffn2_.Forward(ffn2_norm_.Forward(y)), 0.5));
  return final_norm_.Forward(y);
}

Matrix NormalizeAux(const audio::AuxiliaryFeatures& aux, const Vec2WavConfig& c) {
  Matrix out(aux.num_frames(), 3);
  for (int i = 0; i < aux.num_frames(); ++i) {
    out(i, 0) = (std::log(aux.pitch(i)) - c.aux_mean[0]) / c.aux_std[0];
    out(i, 1) = (aux.energy(i) - c.aux_mean[1]) / c.aux_std[1];
    out(i, 2) = (aux.pov(i) - c.aux_mean[2]) / c.aux_std[2];
  }
  return out;
}

audio::AuxiliaryFeatures DenormalizeAux(const Matrix& normalized, const Vec2WavConfig& c) {
  audio::AuxiliaryFeatures aux;
  aux.values.resize(normalized.rows(), 3);
  for (Eigen::Index i = 0; i < normalized.rows(); ++i) {
    aux.values(i, 0) = std::exp(normalized(i, 0) * c.aux_std[0] + c.aux_mean[0]);
    aux.values(i, 1) = normalized(i, 1) * c.aux_std[1] + c.aux_mean[1];
    aux.values(i, 2) = normalized(i, 2) * c.aux_std[2] + c.aux_mean[2];
  }
  return aux;
}

SemanticEncoder::SemanticEncoder(const Vec2WavConfig& c, Rng& rng)
    : dim_(c.d_model),
      embed_(c.num_tokens, c.d_model, rng),
      aux_head_(c.d_model, 3, rng),
      aux_embed_(3, c.d_model, rng) {
  RegisterModule("embed", &embed_);
  for (int b = 0; b < c.blocks; ++b) {
    first_.push_back(std::make_unique<ConformerBlock>(c, rng));
    RegisterModule("first" + std::to_string(b), first_.back().get());
  }
  RegisterModule("aux_head", &aux_head_);
  RegisterModule("aux_embed", &aux_embed_);
  for (int b = 0; b < c.blocks; ++b) {
    second_.push_back(std::make_unique<ConformerBlock>(c, rng));
    RegisterModule("second" + std::to_string(b), second_.back().get());
  }
}

EncoderOutput SemanticEncoder::Forward(const std::vector<int>& tokens, const Tensor& memory,
                                       const Matrix* aux) const {
  CTXTTS_CHECK(!tokens.empty(), errc::kInvalidArgument, "no tokens to vocode");
  for (int t : tokens) {
    CTXTTS_CHECK(t >= 0 && t < embed_.count(), errc::kInvalidArgument,
                 "token " + std::to_string(t) + " outside [0, K)");
  }
  const auto n = static_cast<Eigen::Index>(tokens.size());
  Tensor x = nn::Add(nn::Scale(embed_.Forward(tokens), std::sqrt(static_cast<double>(dim_))),
                     Tensor(nn::SinusoidalPositions(n, dim_)));
  for (const auto& block : first_) x = block->Forward(x, memory);
  EncoderOutput out;
  out.aux = aux_head_.Forward(x);
  Tensor condition = out.aux.Detach();
  if (aux) {
    CTXTTS_CHECK(aux->rows() == n && aux->cols() == 3, errc::kLengthMismatch,
                 "aux features must have one row of three values per token");
    condition = Tensor(*aux);
  }
  x = nn::Add(x, aux_embed_.Forward(condition));
  for (const auto& block : second_) x = block->Forward(x, memory);
  out.hidden = x;
  return out;
}

Generator::Generator(const Vec2WavConfig& c, Rng& rng)
    : factors_(c.upsample_factors),
      pre_(c.d_model, c.generator_channels, Kernel(7), rng),
      post_(c.generator_channels >> c.upsample_factors.size(), 1, Kernel(7), rng) {
  RegisterModule("pre", &pre_);
  int ch = c.generator_channels;
  for (size_t s = 0; s < factors_.size(); ++s) {
    const int u = factors_[s];
    nn::ConvOptions up;
    up.kernel = 2 * u;
    // Zero insertion places input i at row i*u; this padding centres the
    // kernel and keeps exactly u outputs per input.
    up.pad_left = u;
    up.pad_right = u - 1;
    ups_.push_back(std::make_unique<nn::Conv1d>(ch, ch / 2, up, rng));
    RegisterModule("up" + std::to_string(s), ups_.back().get());
    ch /= 2;
    stacks_.emplace_back();
    for (size_t k = 0; k < c.resblock_kernels.size(); ++k) {
      ResStack stack;
      for (size_t d = 0; d < c.resblock_dilations.size(); ++d) {
        stack.convs.push_back(std::make_unique<nn::Conv1d>(
            ch, ch, Kernel(c.resblock_kernels[k], c.resblock_dilations[d]), rng));
        RegisterModule("res" + std::to_string(s) + "_" + std::to_string(k) + "_" +
                           std::to_string(d),
                       stack.convs.back().get());
      }
      stacks_.back().push_back(std::move(stack));
    }
  }
  RegisterModule("post", &post_);
}

Tensor Generator::Forward(const Tensor& hidden) const {
  Tensor x = pre_.Forward(hidden);
  for (size_t s = 0; s < factors_.size(); ++s) {
    x = ups_[s]->Forward(nn::ZeroStuff(nn::LeakyRelu(x, kSlope), factors_[s]));
    Tensor sum;
    for (const ResStack& stack : stacks_[s]) {
      Tensor y = x;
      for (const auto& conv : stack.convs) y = nn::Add(y, conv->Forward(nn::LeakyRelu(y, kSlope)));
      sum = sum.defined() ? nn::Add(sum, y) : y;
    }
    x = nn::Scale(sum, 1.0 / static_cast<double>(stacks_[s].size()));
  }
  return nn::Tanh(post_.Forward(nn::LeakyRelu(x, 0.01)));
}

Vec2WavModel::Vec2WavModel(const Vec2WavConfig& config, Rng& rng)
    : config_((config.Validate(), config)),
      mel_encoder_(config, rng),
      encoder_(config, rng),
      generator_(config, rng),
      mel_(config.features) {
  RegisterModule("mel_encoder", &mel_encoder_);
  RegisterModule("encoder", &encoder_);
  RegisterModule("generator", &generator_);
}

EncoderOutput Vec2WavModel::Encode(const std::vector<int>& tokens, const Matrix& prompt_mel,
                                   const Matrix* aux) const {
  CTXTTS_CHECK(prompt_mel.rows() >= 1, errc::kInvalidArgument, "empty prompt mel");
  CTXTTS_CHECK(prompt_mel.cols() == config_.features.num_mels, errc::kLengthMismatch,
               "prompt mel has " + std::to_string(prompt_mel.cols()) + " bins, expected " +
                   std::to_string(config_.features.num_mels));
  return encoder_.Forward(tokens, mel_encoder_.Forward(prompt_mel), aux);
}

std::vector<double> Vec2WavModel::Synthesize(const std::vector<int>& tokens,
                                             const Matrix& prompt_mel, const Matrix* aux) const {
  nn::NoGradGuard no_grad;
  Tensor wave = generator_.Forward(Encode(tokens, prompt_mel, aux).hidden);
  return std::vector<double>(wave.value().data(), wave.value().data() + wave.value().size());
}

}  // namespace ctxtts::vec2wav
