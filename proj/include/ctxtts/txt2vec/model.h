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

#ifndef CTXTTS_TXT2VEC_MODEL_H_
#define CTXTTS_TXT2VEC_MODEL_H_

#include <memory>
#include <span>
#include <vector>

#include "ctxtts/common/rng.h"
#include "ctxtts/nn/layers.h"
#include "ctxtts/txt2vec/config.h"

namespace ctxtts::txt2vec {

// Pre-norm self-attention block.
class TransformerBlock : public nn::Module {
 public:
  TransformerBlock(int dim, int heads, int ffn_dim, Rng& rng);
  nn::Tensor Forward(const nn::Tensor& x) const;

 private:
  nn::LayerNormLayer norm1_;
  nn::MultiHeadAttention attn_;
  nn::LayerNormLayer norm2_;
  nn::FeedForward ffn_;
};

class TextEncoder : public nn::Module {
 public:
  TextEncoder(const Txt2VecConfig& config, Rng& rng);
  // One row per phoneme. Throws Error(kUnknownPhoneme) on ids outside the
  // inventory.
  nn::Tensor Forward(const std::vector<int>& phonemes) const;

 private:
  int dim_;
  nn::Embedding embed_;
  std::vector<std::unique_ptr<TransformerBlock>> blocks_;
  nn::LayerNormLayer norm_;
};

// Regresses log(1 + frames) per phoneme.
class DurationPredictor : public nn::Module {
 public:
  DurationPredictor(const Txt2VecConfig& config, Rng& rng);
  nn::Tensor Forward(const nn::Tensor& e) const;  // [P x 1]

 private:
  std::vector<std::unique_ptr<nn::Conv1d>> convs_;
  std::vector<std::unique_ptr<nn::LayerNormLayer>> norms_;
  nn::Linear head_;
};

// Frame counts from the regression output: max(0, exp(y) - 1).
std::vector<double> DurationsFromLog(const nn::Matrix& log_durations);

// Repeats row i of e d[i] times.
nn::Tensor LengthRegulate(const nn::Tensor& e, std::span<const int> durations);

class DecoderBlock : public nn::Module {
 public:
  DecoderBlock(const Txt2VecConfig& config, Rng& rng);
  nn::Tensor Forward(const nn::Tensor& x, const nn::Tensor& h, int t) const;

 private:
  nn::Embedding step_;
  nn::LayerNormLayer norm1_;
  nn::MultiHeadAttention attn_;
  nn::Linear text_;
  nn::LayerNormLayer norm2_;
  nn::FeedForward ffn_;
};

// Denoiser over [c_A, x_t, c_B]. Tokens use the diffusion alphabet (1..K
// real, K+1 mask); indicator is 1 on data positions and 0 on context.
class ContextualDecoder : public nn::Module {
 public:
  ContextualDecoder(const Txt2VecConfig& config, Rng& rng);
  // Logits over the K real tokens, one row per data position in order.
  nn::Tensor Forward(const std::vector<int>& sequence, const std::vector<int>& indicator,
                     int t, const nn::Tensor& h) const;

 private:
  int dim_;
  int num_tokens_;
  int steps_;
  nn::Embedding token_;
  nn::Embedding indicator_;
  nn::Linear input_;
  std::vector<std::unique_ptr<DecoderBlock>> blocks_;
  nn::LayerNormLayer norm_;
  nn::Linear output_;
};

class Txt2VecModel : public nn::Module {
 public:
  Txt2VecModel(const Txt2VecConfig& config, Rng& rng);

  const Txt2VecConfig& config() const { return config_; }
  const TextEncoder& encoder() const { return encoder_; }
  const DurationPredictor& duration() const { return duration_; }
  const ContextualDecoder& decoder() const { return decoder_; }

 private:
  Txt2VecConfig config_;
  TextEncoder encoder_;
  DurationPredictor duration_;
  ContextualDecoder decoder_;
};

}  // namespace ctxtts::txt2vec

#endif  // CTXTTS_TXT2VEC_MODEL_H_
