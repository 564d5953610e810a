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

#ifndef CTXTTS_DATA_TOY_CORPUS_H_
#define CTXTTS_DATA_TOY_CORPUS_H_

#include <string>
#include <vector>

#include "json.hpp"

#include "ctxtts/common/rng.h"
#include "ctxtts/data/manifest.h"
#include "ctxtts/data/tokenizer.h"

namespace ctxtts::data {

// Synthetic speech-like corpus. Each phoneme is a fixed spectral envelope
// (formant peaks over a harmonic source, or shaped noise for fricatives)
// and has one duration shared by the whole corpus, so both tokens and
// durations are learnable from the phoneme string alone. Speakers differ in
// pitch and loudness.
struct ToyCorpusConfig {
  int num_utterances = 50;
  int num_phonemes = 8;  // at most 12
  int num_unvoiced = 2;  // the last phonemes of the inventory
  int num_speakers = 2;
  int min_frames = 400;
  int max_frames = 600;
  int min_phone_frames = 20;
  int max_phone_frames = 40;
  // Relative per-occurrence duration jitter; zero keeps durations fixed.
  double tempo_jitter = 0.0;
  TokenizerSpec tokenizer;
};

void to_json(nlohmann::json& j, const ToyCorpusConfig& c);
void from_json(const nlohmann::json& j, ToyCorpusConfig& c);

struct ToyCorpus {
  std::string manifest_path;
  std::string tokenizer_path;
  std::vector<UtteranceRecord> records;
  KMeansTokenizer tokenizer;
  std::vector<double> inertia_history;
};

// Writes wavs/<utt>.wav, manifest.jsonl and tokenizer.json under dir. The
// corpus is a pure function of (config, rng seed).
ToyCorpus MakeToyCorpus(const ToyCorpusConfig& config, Rng& rng, const std::string& dir);

// Synthesizes a single utterance. Exposed for tests.
std::vector<double> SynthesizeToyUtterance(const std::vector<int>& phonemes,
                                           const std::vector<int>& durations,
                                           int speaker, const ToyCorpusConfig& config,
                                           Rng& rng);

}  // namespace ctxtts::data

#endif  // CTXTTS_DATA_TOY_CORPUS_H_
