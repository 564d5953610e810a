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

#ifndef CTXTTS_PIPELINE_PIPELINE_H_
#define CTXTTS_PIPELINE_PIPELINE_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ctxtts/data/tokenizer.h"
#include "ctxtts/txt2vec/trainer.h"
#include "ctxtts/vec2wav/model.h"

namespace ctxtts::pipeline {

struct ContextInput {
  std::vector<double> samples;
  std::vector<std::string> phonemes;
  std::vector<int> durations;  // frames per phoneme
  std::vector<int> tokens;     // 0-based; empty means tokenize the samples
};

struct EditRequest {
  ContextInput context_a;
  std::optional<ContextInput> context_b;  // absent for continuation
  std::vector<std::string> target_phonemes;
  std::string output_path;  // WAV written here when non-empty
  uint64_t seed = 0;
  double temperature = 1.0;
};

struct EditOutput {
  std::vector<int> tokens;  // 0-based [c_A, x_0, c_B]
  txt2vec::EditResult edit;
  std::vector<double> waveform;
};

// Token model, vocoder and (optionally) the tokenizer for context audio.
class EditPipeline {
 public:
  // Throws Error(kCheckpointMismatch) if the token count or frame rate of
  // the parts disagree.
  EditPipeline(txt2vec::LoadedTxt2Vec txt2vec, std::unique_ptr<vec2wav::Vec2WavModel> vocoder,
               std::optional<data::KMeansTokenizer> tokenizer = std::nullopt);

  // tokenizer_path may be empty.
  static EditPipeline Load(const std::string& txt2vec_path, const std::string& vocoder_path,
                           const std::string& tokenizer_path);

  // Editing runs the contextual generator with whatever context B is
  // present; continuation requires it to be absent and runs the
  // continuation entry point. Both vocode with the prompt [m_A, m_B] unless
  // vocode is false.
  EditOutput RunEdit(const EditRequest& request, bool vocode = true) const;
  EditOutput RunContinue(const EditRequest& request, bool vocode = true) const;

  // Validated 0-based context tokens: given ones, or the tokenizer's.
  std::vector<int> ContextTokens(const ContextInput& context) const;

  const txt2vec::Txt2VecModel& txt2vec() const { return *txt2vec_.model; }
  const vec2wav::Vec2WavModel& vocoder() const { return *vocoder_; }

 private:
  EditOutput Finish(const EditRequest& request, txt2vec::EditResult result, bool vocode) const;
  txt2vec::EditInputs Inputs(const EditRequest& request) const;

  txt2vec::LoadedTxt2Vec txt2vec_;
  std::unique_ptr<vec2wav::Vec2WavModel> vocoder_;
  std::optional<data::KMeansTokenizer> tokenizer_;
};

}  // namespace ctxtts::pipeline

#endif  // CTXTTS_PIPELINE_PIPELINE_H_
