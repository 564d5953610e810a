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

#include "ctxtts/pipeline/pipeline.h"

#include <cmath>
#include <numeric>

#include "ctxtts/audio/wav.h"
#include "ctxtts/common/error.h"
#include "ctxtts/vec2wav/training.h"

namespace ctxtts::pipeline {

namespace {

void CheckFrameRate(double a, double b, const std::string& what) {
  CTXTTS_CHECK(std::abs(a - b) < 1e-9, errc::kCheckpointMismatch,
               what + " frame rate " + std::to_string(a) + " differs from the vocoder's " +
                   std::to_string(b));
}

}  // namespace

EditPipeline::EditPipeline(txt2vec::LoadedTxt2Vec t2v,
                           std::unique_ptr<vec2wav::Vec2WavModel> vocoder,
                           std::optional<data::KMeansTokenizer> tokenizer)
    : txt2vec_(std::move(t2v)), vocoder_(std::move(vocoder)), tokenizer_(std::move(tokenizer)) {
  const auto& tc = txt2vec_.model->config();
  const auto& vc = vocoder_->config();
  CTXTTS_CHECK(tc.num_tokens == vc.num_tokens, errc::kCheckpointMismatch,
               "txt2vec has K=" + std::to_string(tc.num_tokens) + " but the vocoder has K=" +
                   std::to_string(vc.num_tokens));
  const double rate = static_cast<double>(vc.features.sample_rate) / vc.hop();
  CheckFrameRate(tc.frame_rate, rate, "txt2vec");
  if (tokenizer_) {
    const auto& spec = tokenizer_->spec();
    CTXTTS_CHECK(spec.num_tokens == vc.num_tokens, errc::kCheckpointMismatch,
                 "tokenizer K differs from the models' K");
    CheckFrameRate(static_cast<double>(spec.features.sample_rate) / spec.features.hop, rate,
                   "tokenizer");
  }
}

EditPipeline EditPipeline::Load(const std::string& txt2vec_path,
                                const std::string& vocoder_path,
                                const std::string& tokenizer_path) {
  std::optional<data::KMeansTokenizer> tokenizer;
  if (!tokenizer_path.empty()) tokenizer = data::KMeansTokenizer::Load(tokenizer_path);
  return EditPipeline(txt2vec::LoadTxt2Vec(txt2vec_path), vec2wav::LoadVec2Wav(vocoder_path),
                      std::move(tokenizer));
}

std::vector<int> EditPipeline::ContextTokens(const ContextInput& c) const {
  CTXTTS_CHECK(!c.phonemes.empty(), errc::kInvalidArgument, "context has no phonemes");
  CTXTTS_CHECK(c.durations.size() == c.phonemes.size(), errc::kInvalidArgument,
               "context needs one duration per phoneme");
  const auto& features = vocoder_->config().features;
  std::vector<int> tokens = c.tokens;
  if (tokens.empty()) {
    CTXTTS_CHECK(tokenizer_.has_value(), errc::kInvalidArgument,
                 "context tokens not given and no tokenizer loaded");
    tokens = tokenizer_->Tokenize(c.samples);
  } else {
    CTXTTS_CHECK(features.NumFrames(static_cast<long>(c.samples.size())) ==
                     static_cast<int>(tokens.size()),
                 errc::kLengthMismatch, "context audio and tokens have different frame counts");
  }
  const int frames = std::accumulate(c.durations.begin(), c.durations.end(), 0);
  CTXTTS_CHECK(frames == static_cast<int>(tokens.size()), errc::kLengthMismatch,
               "context durations sum to " + std::to_string(frames) + " but the audio has " +
                   std::to_string(tokens.size()) + " frames");
  for (int t : tokens) {
    CTXTTS_CHECK(t >= 0 && t < vocoder_->config().num_tokens, errc::kInvalidArgument,
                 "context token out of range");
  }
  return tokens;
}

txt2vec::EditInputs EditPipeline::Inputs(const EditRequest& r) const {
  const auto& inventory = txt2vec_.inventory;
  txt2vec::EditInputs in;
  in.phonemes_a = inventory.Ids(r.context_a.phonemes);
  in.durations_a = r.context_a.durations;
  for (int t : ContextTokens(r.context_a)) in.context_a.push_back(t + 1);
  in.phonemes_d = inventory.Ids(r.target_phonemes);
  if (r.context_b) {
    in.phonemes_b = inventory.Ids(r.context_b->phonemes);
    in.durations_b = r.context_b->durations;
    for (int t : ContextTokens(*r.context_b)) in.context_b.push_back(t + 1);
  }
  return in;
}

EditOutput EditPipeline::RunEdit(const EditRequest& request, bool vocode) const {
  Rng rng(request.seed);
  txt2vec::InferenceOptions options;
  options.temperature = request.temperature;
  return Finish(request,
                txt2vec::InferEdit(*txt2vec_.model, *txt2vec_.schedule, Inputs(request), rng,
                                   options),
                vocode);
}

EditOutput EditPipeline::RunContinue(const EditRequest& request, bool vocode) const {
  CTXTTS_CHECK(!request.context_b.has_value(), errc::kInvalidArgument,
               "continuation takes no context B");
  const txt2vec::EditInputs in = Inputs(request);
  Rng rng(request.seed);
  txt2vec::InferenceOptions options;
  options.temperature = request.temperature;
  return Finish(request,
                txt2vec::InferContinue(*txt2vec_.model, *txt2vec_.schedule, in.phonemes_a,
                                       in.phonemes_d, in.durations_a, in.context_a, rng,
                                       options),
                vocode);
}

EditOutput EditPipeline::Finish(const EditRequest& request, txt2vec::EditResult result,
                                bool vocode) const {
  EditOutput out;
  out.tokens.reserve(result.tokens.size());
  for (int t : result.tokens) out.tokens.push_back(t - 1);
  out.edit = std::move(result);
  if (!vocode) return out;

  const audio::MelExtractor& mel = vocoder_->mel_extractor();
  nn::Matrix prompt = mel.Compute(request.context_a.samples).frames;
  if (request.context_b) {
    const nn::Matrix mb = mel.Compute(request.context_b->samples).frames;
    nn::Matrix joined(prompt.rows() + mb.rows(), prompt.cols());
    joined << prompt, mb;
    prompt = std::move(joined);
  }
  out.waveform = vocoder_->Synthesize(out.tokens, prompt);
  if (!request.output_path.empty()) {
    audio::WriteWav(request.output_path, out.waveform, vocoder_->config().features.sample_rate);
  }
  return out;
}

}  // namespace ctxtts::pipeline
