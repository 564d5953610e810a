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

#include "ctxtts/txt2vec/model.h"

#include <cmath>
#include <string>

#include "ctxtts/common/error.h"

namespace ctxtts::txt2vec {

using nn::Tensor;

TransformerBlock::TransformerBlock(int dim, int heads, int ffn_dim, Rng& rng)
    : norm1_(dim),
      attn_(dim, heads, rng),
      norm2_(dim),
      ffn_(dim, ffn_dim, nn::Activation::kGelu, rng) {
  RegisterModule("norm1", &norm1_);
  RegisterModule("attn", &attn_);
  RegisterModule("norm2", &norm2_);
  RegisterModule("ffn", &ffn_);
}

Tensor TransformerBlock::Forward(const Tensor& x) const {
  Tensor n = norm1_.Forward(x);
  Tensor y = nn::Add(x, attn_.Forward(n, n));
  return nn::Add(y, ffn_.Forward(norm2_.Forward(y)));
}

TextEncoder::TextEncoder(const Txt2VecConfig& config, Rng& rng)
    : dim_(config.d_model),
      embed_(config.num_phonemes, config.d_model, rng),
      norm_(config.d_model) {
  RegisterModule("embed", &embed_);
  for (int b = 0; b < config.text_blocks; ++b) {
    blocks_.push_back(
        std::make_unique<TransformerBlock>(config.d_model, config.heads, config.ffn_dim, rng));
    RegisterModule("block" + std::to_string(b), blocks_.back().get());
  }
  RegisterModule("norm", &norm_);
}

Tensor TextEncoder::Forward(const std::vector<int>& phonemes) const {
  CTXTTS_CHECK(!phonemes.empty(), errc::kInvalidArgument, "empty phoneme sequence");
  for (int p : phonemes) {
    CTXTTS_CHECK(p >= 0 && p < embed_.count(), errc::kUnknownPhoneme,
                 "phoneme id " + std::to_string(p) + " outside the inventory");
  }
  Tensor x = nn::Add(nn::Scale(embed_.Forward(phonemes), std::sqrt(static_cast<double>(dim_))),
                     Tensor(nn::SinusoidalPositions(static_cast<Eigen::Index>(phonemes.size()), dim_)));
  for (const auto& block : blocks_) x = block->Forward(x);
  return norm_.Forward(x);
}

DurationPredictor::DurationPredictor(const Txt2VecConfig& config, Rng& rng)
    : head_(config.duration_channels, 1, rng) {
  int in = config.d_model;
  for (int l = 0; l < config.duration_layers; ++l) {
    nn::ConvOptions opt;
    opt.kernel = config.duration_kernel;
    convs_.push_back(std::make_unique<nn::Conv1d>(in, config.duration_channels, opt, rng));
    norms_.push_back(std::make_unique<nn::LayerNormLayer>(config.duration_channels));
    RegisterModule("conv" + std::to_string(l), convs_.back().get());
    RegisterModule("norm" + std::to_string(l), norms_.back().get());
    in = config.duration_channels;
  }
  RegisterModule("head", &head_);
}

Tensor DurationPredictor::Forward(const Tensor& e) const {
  Tensor x = e;
  for (size_t l = 0; l < convs_.size(); ++l) {
    x = norms_[l]->Forward(nn::Relu(convs_[l]->Forward(x)));
  }
  return head_.Forward(x);
}

std::vector<double> DurationsFromLog(const nn::Matrix& log_durations) {
  std::vector<double> out(log_durations.size());
  for (Eigen::Index i = 0; i < log_durations.size(); ++i) {
    out[i] = std::max(0.0, std::exp(log_durations.data()[i]) - 1.0);
  }
  return out;
}

Tensor LengthRegulate(const Tensor& e, std::span<const int> durations) {
  CTXTTS_CHECK(static_cast<Eigen::Index>(durations.size()) == e.rows(),
               errc::kLengthMismatch, "one duration per phoneme required");
  std::vector<int> index;
  for (size_t i = 0; i < durations.size(); ++i) {
    CTXTTS_CHECK(durations[i] >= 0, errc::kInvalidArgument, "negative duration");
    index.insert(index.end(), durations[i], static_cast<int>(i));
  }
  return nn::GatherRows(e, index);
}

DecoderBlock::DecoderBlock(const Txt2VecConfig& config, Rng& rng)
    : step_(config.steps, config.d_model, rng),
      norm1_(config.d_model),
      attn_(config.d_model, config.heads, rng),
      text_(config.d_model, config.d_model, rng),
      norm2_(config.d_model),
      ffn_(config.d_model, config.ffn_dim, nn::Activation::kGelu, rng) {
  RegisterModule("step", &step_);
  RegisterModule("norm1", &norm1_);
  RegisterModule("attn", &attn_);
  RegisterModule("text", &text_);
  RegisterModule("norm2", &norm2_);
  RegisterModule("ffn", &ffn_);
}

Tensor DecoderBlock::Forward(const Tensor& x, const Tensor& h, int t) const {
  Tensor in = nn::AddRow(x, step_.Forward({t - 1}));
  Tensor n = norm1_.Forward(in);
  Tensor y = nn::Add(nn::Add(in, attn_.Forward(n, n)), text_.Forward(h));
  return nn::Add(y, ffn_.Forward(norm2_.Forward(y)));
}

ContextualDecoder::ContextualDecoder(const Txt2VecConfig& config, Rng& rng)
    : dim_(config.d_model),
      num_tokens_(config.num_tokens),
      steps_(config.steps),
      token_(config.num_tokens + 1, config.d_model, rng),
      indicator_(2, config.d_model, rng),
      input_(config.d_model, config.d_model, rng),
      norm_(config.d_model),
      output_(config.d_model, config.num_tokens, rng) {
  RegisterModule("token", &token_);
  RegisterModule("indicator", &indicator_);
  RegisterModule("input", &input_);
  for (int b = 0; b < config.decoder_blocks; ++b) {
    blocks_.push_back(std::make_unique<DecoderBlock>(config, rng));
    RegisterModule("block" + std::to_string(b), blocks_.back().get());
  }
  RegisterModule("norm", &norm_);
  RegisterModule("output", &output_);
}

Tensor ContextualDecoder::Forward(const std::vector<int>& sequence,
                                  const std::vector<int>& indicator, int t,
                                  const Tensor& h) const {
  const auto n = static_cast<Eigen::Index>(sequence.size());
  CTXTTS_CHECK(n > 0, errc::kInvalidArgument, "empty decoder input");
  CTXTTS_CHECK(static_cast<Eigen::Index>(indicator.size()) == n && h.rows() == n,
               errc::kLengthMismatch,
               "decoder input has " + std::to_string(n) + " tokens, " +
                   std::to_string(indicator.size()) + " indicator flags and " +
                   std::to_string(h.rows()) + " text frames");
  CTXTTS_CHECK(t >= 1 && t <= steps_, errc::kInvalidArgument, "step outside [1, T]");
  std::vector<int> ids(n), data_rows;
  for (Eigen::Index i = 0; i < n; ++i) {
    CTXTTS_CHECK(sequence[i] >= 1 && sequence[i] <= num_tokens_ + 1, errc::kInvalidArgument,
                 "token outside the codebook");
    CTXTTS_CHECK(indicator[i] == 0 || indicator[i] == 1, errc::kInvalidArgument,
                 "indicator must be binary");
    CTXTTS_CHECK(indicator[i] == 1 || sequence[i] <= num_tokens_, errc::kInvalidArgument,
                 "context tokens must not be masked");
    ids[i] = sequence[i] - 1;
    if (indicator[i] == 1) data_rows.push_back(static_cast<int>(i));
  }
  Tensor x = nn::Scale(nn::Add(token_.Forward(ids), indicator_.Forward(indicator)),
                       std::sqrt(static_cast<double>(dim_)));
  x = nn::Add(input_.Forward(x), Tensor(nn::SinusoidalPositions(n, dim_)));
  for (const auto& block : blocks_) x = block->Forward(x, h, t);
  Tensor data = nn::GatherRows(norm_.Forward(x), data_rows);
  return output_.Forward(data);
}

Txt2VecModel::Txt2VecModel(const Txt2VecConfig& config, Rng& rng)
    : config_((config.Validate(), config)),
      encoder_(config, rng),
      duration_(config, rng),
      decoder_(config, rng) {
  RegisterModule("encoder", &encoder_);
  RegisterModule("duration", &duration_);
  RegisterModule("decoder", &decoder_);
}

}  // namespace ctxtts::txt2vec
