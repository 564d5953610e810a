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

#ifndef CTXTTS_VEC2WAV_MODEL_H_
#define CTXTTS_VEC2WAV_MODEL_H_

#include <memory>
#include <vector>

#include "ctxtts/audio/features.h"
#include "ctxtts/common/rng.h"
#include "ctxtts/nn/layers.h"
#include "ctxtts/vec2wav/config.h"

namespace ctxtts::vec2wav {

// Order-free encoding of a prompt mel: one convolution over time, no
// positional information.
class MelEncoder : public nn::Module {
 public:
  MelEncoder(const Vec2WavConfig& config, Rng& rng);
  nn::Tensor Forward(const nn::Matrix& mel) const;  // [P x mel_channels]

 private:
  nn::Conv1d conv_;
};

// Conformer block with a cross-attention sub-layer after self-attention:
// half FFN, self-attention, cross-attention to the prompt, convolution
// module, half FFN, final norm.
class ConformerBlock : public nn::Module {
 public:
  ConformerBlock(const Vec2WavConfig& config, Rng& rng);
  nn::Tensor Forward(const nn::Tensor& x, const nn::Tensor& memory) const;

 private:
  nn::LayerNormLayer ffn1_norm_;
  nn::FeedForward ffn1_;
  nn::LayerNormLayer self_norm_;
  nn::MultiHeadAttention self_attn_;
  nn::LayerNormLayer cross_norm_;
  nn::MultiHeadAttention cross_attn_;
  nn::LayerNormLayer conv_norm_;
  nn::Linear conv_in_;  // to 2*d for the GLU
  nn::DepthwiseConv depthwise_;
  nn::LayerNormLayer conv_mid_norm_;
  nn::Linear conv_out_;
  nn::LayerNormLayer ffn2_norm_;
  nn::FeedForward ffn2_;
  nn::LayerNormLayer final_norm_;
};

struct EncoderOutput {
  nn::Tensor hidden;  // [F x d_model]
  nn::Tensor aux;     // predicted normalized aux, [F x 3]
};

// (log pitch, energy, pov) mapped through the config's affine
// normalization, [F x 3].
nn::Matrix NormalizeAux(const audio::AuxiliaryFeatures& aux, const Vec2WavConfig& config);
audio::AuxiliaryFeatures DenormalizeAux(const nn::Matrix& normalized,
                                        const Vec2WavConfig& config);

// Two groups of Conformer blocks around the auxiliary-feature adaptor.
class SemanticEncoder : public nn::Module {
 public:
  SemanticEncoder(const Vec2WavConfig& config, Rng& rng);
  // tokens are 0-based ids in [0, K). When aux is given (normalized, one
  // row per token) it conditions the second group in place of the
  // prediction.
  EncoderOutput Forward(const std::vector<int>& tokens, const nn::Tensor& memory,
                        const nn::Matrix* aux = nullptr) const;

 private:
  int dim_;
  nn::Embedding embed_;
  std::vector<std::unique_ptr<ConformerBlock>> first_;
  nn::Linear aux_head_;
  nn::Linear aux_embed_;
  std::vector<std::unique_ptr<ConformerBlock>> second_;
};

// HiFi-GAN style upsampler: zero insertion followed by a convolution of
// twice the factor, then multi-receptive-field residual stacks.
class Generator : public nn::Module {
 public:
  Generator(const Vec2WavConfig& config, Rng& rng);
  nn::Tensor Forward(const nn::Tensor& hidden) const;  // [F*hop x 1] in (-1, 1)

 private:
  struct ResStack {
    std::vector<std::unique_ptr<nn::Conv1d>> convs;
  };
  std::vector<int> factors_;
  nn::Conv1d pre_;
  std::vector<std::unique_ptr<nn::Conv1d>> ups_;
  std::vector<std::vector<ResStack>> stacks_;  // [stage][kernel]
  nn::Conv1d post_;
};

class Vec2WavModel : public nn::Module {
 public:
  Vec2WavModel(const Vec2WavConfig& config, Rng& rng);

  const Vec2WavConfig& config() const { return config_; }
  const MelEncoder& mel_encoder() const { return mel_encoder_; }
  const SemanticEncoder& encoder() const { return encoder_; }
  const Generator& generator() const { return generator_; }
  const audio::MelExtractor& mel_extractor() const { return mel_; }

  // Tokens plus prompt mel to hidden states and predicted aux. Throws on an
  // empty prompt or a prompt with the wrong number of mel bins.
  EncoderOutput Encode(const std::vector<int>& tokens, const nn::Matrix& prompt_mel,
                       const nn::Matrix* aux = nullptr) const;

  // Inference: waveform of tokens.size() * hop samples.
  std::vector<double> Synthesize(const std::vector<int>& tokens, const nn::Matrix& prompt_mel,
                                 const nn::Matrix* aux = nullptr) const;

 private:
  Vec2WavConfig config_;
  MelEncoder mel_encoder_;
  SemanticEncoder encoder_;
  Generator generator_;
  audio::MelExtractor mel_;
};

}  // namespace ctxtts::vec2wav

#endif  // CTXTTS_VEC2WAV_MODEL_H_
