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

#ifndef CTXTTS_VEC2WAV_TRAINING_H_
#define CTXTTS_VEC2WAV_TRAINING_H_

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ctxtts/audio/features.h"
#include "ctxtts/common/rng.h"
#include "ctxtts/data/manifest.h"
#include "ctxtts/vec2wav/discriminator.h"
#include "ctxtts/vec2wav/model.h"

namespace ctxtts::vec2wav {

struct Vec2WavExample {
  std::string utt_id;
  std::vector<int> tokens;         // 0-based, one per frame
  nn::Matrix mel;                  // [F x num_mels]
  audio::AuxiliaryFeatures aux;    // raw, one row per frame
  std::vector<double> wave;        // zero-padded to F * hop samples

  int num_frames() const { return static_cast<int>(tokens.size()); }
};

// Reads the audio of every record and extracts mel and aux features.
// Throws Error(kLengthMismatch) if a record's tokens and mel frames differ.
std::vector<Vec2WavExample> ExamplesFromRecords(const std::vector<data::UtteranceRecord>& records,
                                                const std::string& manifest_path,
                                                const audio::FeatureConfig& features);

// Per-dimension mean and standard deviation of (log pitch, energy, pov) over
// all frames, written into config->aux_mean and config->aux_std.
void FitAuxNormalization(const std::vector<Vec2WavExample>& examples, Vec2WavConfig* config);

struct PromptSplit {
  int prompt_frames = 0;
  int target_frames = 0;
};

// Prompt length uniform over whole frames in [prompt_min, prompt_max]
// seconds; the rest is the target. Returns nullopt when the utterance cannot
// hold the longest prompt plus min_target_frames.
std::optional<PromptSplit> SplitForTraining(int num_frames, const Vec2WavConfig& config,
                                            Rng& rng);

// The encoder sees the whole target; the generator only a window of it.
struct TrainingCrop {
  nn::Matrix prompt_mel;           // mel of the prompt segment
  std::vector<int> tokens;         // whole target segment
  nn::Matrix aux;                  // normalized aux of the target
  int crop_start = 0;              // window offset within the target
  int crop_frames = 0;
  std::vector<double> wave;        // window waveform
};

// Splits the utterance and picks a window of at most crop_frames inside the
// target. Returns nullopt when the split is infeasible.
std::optional<TrainingCrop> SampleCrop(const Vec2WavExample& example,
                                       const Vec2WavConfig& config, Rng& rng);

struct GeneratorLossBreakdown {
  double total = 0.0;
  double adversarial = 0.0;
  double feature = 0.0;
  double mel = 0.0;  // unweighted mean absolute log-mel error
  double aux = 0.0;  // unweighted mean absolute normalized aux error
};

struct GeneratorForward {
  nn::Tensor loss;
  nn::Tensor fake;  // generated waveform [samples x 1]
  GeneratorLossBreakdown parts;
};

// Reconstruction and aux terms always; the adversarial and feature matching
// terms only when discriminators are given and step >= warmup_steps.
GeneratorForward GeneratorLoss(const Vec2WavModel& model, const Discriminators* discriminators,
                               const TrainingCrop& crop, int step);

// Least-squares discriminator loss on a real and a detached fake waveform.
nn::Tensor DiscriminatorLoss(const Discriminators& discriminators, const nn::Tensor& real,
                             const nn::Tensor& fake);

struct Vec2WavProgress {
  int step = 0;
  double seconds = 0.0;
  double learning_rate = 0.0;
  double disc_loss = 0.0;
  bool adversarial_active = false;
  GeneratorLossBreakdown loss;  // averaged over the log window
};

struct Vec2WavSummary {
  int steps = 0;
  double seconds = 0.0;
  int skipped = 0;  // draws rejected because the utterance was too short
  std::vector<GeneratorLossBreakdown> history;
  std::vector<double> disc_history;  // 0 during warmup
  int discriminator_updates = 0;
};

// Alternating updates: a generator step, then a discriminator step on the
// same detached fake. During warmup the discriminator is neither evaluated
// nor updated.
Vec2WavSummary TrainVec2Wav(Vec2WavModel* model, Discriminators* discriminators,
                            const std::vector<Vec2WavExample>& examples,
                            const Vec2WavTrainConfig& config, Rng& rng,
                            const std::function<void(const Vec2WavProgress&)>& on_log = {});

// Resynthesizes frames [prompt_frames, F) with the first prompt_frames as the
// mel prompt and predicted aux, and returns the mean absolute log-mel error
// against the reference audio.
double MelDistance(const Vec2WavModel& model, const Vec2WavExample& example,
                   int prompt_frames);

void SaveVec2Wav(const std::string& path, const Vec2WavModel& model);
std::unique_ptr<Vec2WavModel> LoadVec2Wav(const std::string& path);

}  // namespace ctxtts::vec2wav

#endif  // CTXTTS_VEC2WAV_TRAINING_H_
