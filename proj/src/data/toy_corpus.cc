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

#include "ctxtts/data/toy_corpus.h"

#include <array>
#include <cmath>
#include <filesystem>

#include "ctxtts/audio/wav.h"
#include "ctxtts/common/error.h"

namespace ctxtts::data {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Voiced {
  const char* name;
  std::array<double, 3> formants;
};

struct Unvoiced {
  const char* name;
  double lo, hi;  // Hz band of the noise
};

constexpr std::array<Voiced, 8> kVoiced = {{{"AA", {730, 1090, 2440}},
                                            {"IY", {270, 2290, 3010}},
                                            {"UW", {300, 870, 2240}},
                                            {"EH", {530, 1840, 2480}},
                                            {"OW", {570, 840, 2410}},
                                            {"AE", {660, 1720, 2410}},
                                            {"ER", {490, 1350, 1690}},
                                            {"IH", {390, 1990, 2550}}}};
constexpr std::array<Unvoiced, 4> kUnvoiced = {{{"S", 4500, 7500},
                                                {"SH", 2000, 4000},
                                                {"F", 1000, 6000},
                                                {"TH", 3000, 5500}}};
constexpr std::array<double, 4> kSpeakerF0 = {110.0, 200.0, 150.0, 240.0};
constexpr std::array<double, 4> kSpeakerGain = {0.35, 0.2, 0.28, 0.15};
constexpr double kTopHz = 7600.0;

double FormantEnvelope(const Voiced& v, double f) {
  constexpr std::array<double, 3> kBandwidth = {90.0, 120.0, 160.0};
  constexpr std::array<double, 3> kLevel = {1.0, 0.6, 0.3};
  double a = 0.01;
  for (int i = 0; i < 3; ++i) {
    const double z = (f - v.formants[i]) / kBandwidth[i];
    a += kLevel[i] * std::exp(-0.5 * z * z);
  }
  return a;
}

int NumVoiced(const ToyCorpusConfig& c) { return c.num_phonemes - c.num_unvoiced; }

std::string PhonemeName(int p, const ToyCorpusConfig& c) {
  return p < NumVoiced(c) ? kVoiced[p].name : kUnvoiced[p - NumVoiced(c)].name;
}

void Validate(const ToyCorpusConfig& c) {
  CTXTTS_CHECK(c.num_unvoiced >= 0 && c.num_unvoiced <= static_cast<int>(kUnvoiced.size()) &&
                   NumVoiced(c) >= 1 && NumVoiced(c) <= static_cast<int>(kVoiced.size()),
               errc::kInvalidConfig, "toy corpus phoneme inventory out of range");
  CTXTTS_CHECK(c.num_phonemes >= 2, errc::kInvalidConfig, "need at least two phonemes");
  CTXTTS_CHECK(c.num_speakers >= 1 && c.num_speakers <= static_cast<int>(kSpeakerF0.size()),
               errc::kInvalidConfig, "toy corpus supports 1 to 4 speakers");
  CTXTTS_CHECK(c.num_utterances >= 1 && c.min_frames >= 1 && c.max_frames >= c.min_frames &&
                   c.min_phone_frames >= 1 && c.max_phone_frames >= c.min_phone_frames &&
                   c.tempo_jitter >= 0.0 && c.tempo_jitter < 1.0,
               errc::kInvalidConfig, "inconsistent toy corpus sizes");
}

}  // namespace

void to_json(json& j, const ToyCorpusConfig& c) {
  j = {{"num_utterances", c.num_utterances},     {"num_phonemes", c.num_phonemes},
       {"num_unvoiced", c.num_unvoiced},         {"num_speakers", c.num_speakers},
       {"min_frames", c.min_frames},             {"max_frames", c.max_frames},
       {"min_phone_frames", c.min_phone_frames}, {"max_phone_frames", c.max_phone_frames},
       {"tempo_jitter", c.tempo_jitter},         {"tokenizer", c.tokenizer}};
}

void from_json(const json& j, ToyCorpusConfig& c) {
  ToyCorpusConfig d;
  c.num_utterances = j.value("num_utterances", d.num_utterances);
  c.num_phonemes = j.value("num_phonemes", d.num_phonemes);
  c.num_unvoiced = j.value("num_unvoiced", d.num_unvoiced);
  c.num_speakers = j.value("num_speakers", d.num_speakers);
  c.min_frames = j.value("min_frames", d.min_frames);
  c.max_frames = j.value("max_frames", d.max_frames);
  c.min_phone_frames = j.value("min_phone_frames", d.min_phone_frames);
  c.max_phone_frames = j.value("max_phone_frames", d.max_phone_frames);
  c.tempo_jitter = j.value("tempo_jitter", d.tempo_jitter);
  c.tokenizer = j.contains("tokenizer") ? j.at("tokenizer").get<TokenizerSpec>() : d.tokenizer;
}

std::vector<double> SynthesizeToyUtterance(const std::vector<int>& phonemes,
                                           const std::vector<int>& durations, int speaker,
                                           const ToyCorpusConfig& config, Rng& rng) {
  Validate(config);
  CTXTTS_CHECK(phonemes.size() == durations.size(), errc::kLengthMismatch,
               "phonemes and durations differ in length");
  const int sr = config.tokenizer.features.sample_rate;
  const int hop = config.tokenizer.features.hop;
  const int ramp = hop / 2;  // half-width of the crossfade between phonemes
  long total = 0;
  for (int d : durations) total += d;
  std::vector<double> out(static_cast<size_t>(total) * hop, 0.0);
  const long n = static_cast<long>(out.size());
  const double f0 = kSpeakerF0.at(speaker);
  const double gain = kSpeakerGain.at(speaker);

  long start = 0;
  for (size_t s = 0; s < phonemes.size(); ++s) {
    const long end = start + static_cast<long>(durations[s]) * hop;
    if (end == start) continue;
    const int p = phonemes[s];
    CTXTTS_CHECK(p >= 0 && p < config.num_phonemes, errc::kInvalidArgument,
                 "phoneme id out of range");
    // Partials of this segment: frequency, amplitude, phase.
    std::vector<std::array<double, 3>> partials;
    double power = 0.0;
    if (p < NumVoiced(config)) {
      for (int h = 1; h * f0 < kTopHz; ++h) {
        const double a = FormantEnvelope(kVoiced[p], h * f0);
        partials.push_back({h * f0, a, 0.0});
        power += 0.5 * a * a;
      }
    } else {
      const Unvoiced& u = kUnvoiced[p - NumVoiced(config)];
      for (double f = u.lo; f < u.hi; f += 25.0) {
        partials.push_back({f + rng.Uniform(0.0, 25.0), 1.0, rng.Uniform(0.0, 2.0 * M_PI)});
        power += 0.5;
      }
    }
    const double level = (p < NumVoiced(config) ? 1.0 : 0.5) * gain / std::sqrt(power);
    const long lo = std::max(0L, start - ramp);
    const long hi = std::min(n, end + ramp);
    for (long i = lo; i < hi; ++i) {
      // Linear crossfade across each internal boundary; utterance edges are
      // not faded.
      double w = 1.0;
      if (start > 0 && i < start + ramp) w = std::min(w, 0.5 + 0.5 * (i - start) / ramp);
      if (end < n && i >= end - ramp) w = std::min(w, 0.5 - 0.5 * (i - end) / ramp);
      if (w <= 0.0) continue;
      const double t = static_cast<double>(i) / sr;
      double acc = 0.0;
      for (const auto& [f, a, phase] : partials) acc += a * std::sin(2.0 * M_PI * f * t + phase);
      out[i] += w * level * acc;
    }
    start = end;
  }
  for (double& x : out) x = audio::QuantizePcm16(x);
  return out;
}

ToyCorpus MakeToyCorpus(const ToyCorpusConfig& config, Rng& rng, const std::string& dir) {
  Validate(config);
  const audio::FeatureConfig& fc = config.tokenizer.features;
  fs::create_directories(fs::path(dir) / "wavs");

  Rng duration_rng = rng.Child(1);
  std::vector<int> phone_frames(config.num_phonemes);
  for (int& d : phone_frames) {
    d = static_cast<int>(duration_rng.UniformInt(config.min_phone_frames, config.max_phone_frames));
  }

  ToyCorpus corpus{(fs::path(dir) / "manifest.jsonl").string(),
                   (fs::path(dir) / "tokenizer.json").string(),
                   {},
                   KMeansTokenizer(config.tokenizer),
                   {}};
  std::vector<std::vector<double>> waves;
  std::vector<std::vector<int>> phone_ids;
  for (int u = 0; u < config.num_utterances; ++u) {
    Rng urng = rng.Child(100 + u);
    const int target = static_cast<int>(urng.UniformInt(config.min_frames, config.max_frames));
    std::vector<int> ids, durs;
    int total = 0;
    while (total < target) {
      int p;
      do {
        p = static_cast<int>(urng.UniformInt(0, config.num_phonemes - 1));
      } while (!ids.empty() && p == ids.back());
      int d = phone_frames[p];
      if (config.tempo_jitter > 0.0) {
        d = std::max(1, static_cast<int>(std::lround(
                            d * (1.0 + urng.Uniform(-config.tempo_jitter, config.tempo_jitter)))));
      }
      ids.push_back(p);
      durs.push_back(d);
      total += d;
    }
    phone_ids.push_back(ids);
    const int speaker = u % config.num_speakers;
    waves.push_back(SynthesizeToyUtterance(ids, durs, speaker, config, urng));

    char name[32];
    std::snprintf(name, sizeof(name), "toy%03d", u);
    UtteranceRecord r;
    r.utt_id = name;
    r.audio_path = std::string("wavs/") + name + ".wav";
    for (int p : ids) r.phonemes.push_back(PhonemeName(p, config));
    r.durations = durs;
    r.speaker_id = "spk" + std::to_string(speaker);
    audio::WriteWav((fs::path(dir) / r.audio_path).string(), waves.back(), fc.sample_rate);
    corpus.records.push_back(std::move(r));
  }

  if (config.tokenizer.kind == TokenizerSpec::Kind::kKMeans) {
    std::vector<nn::Matrix> feats;
    for (const auto& w : waves) feats.push_back(corpus.tokenizer.Features(w));
    Rng kmeans_rng = rng.Child(2);
    corpus.inertia_history = corpus.tokenizer.Fit(feats, kmeans_rng);
    for (size_t u = 0; u < waves.size(); ++u) {
      corpus.records[u].tokens = corpus.tokenizer.Assign(feats[u]);
    }
    corpus.tokenizer.Save(corpus.tokenizer_path);
  } else {
    // Without a learned quantizer the token of a frame is its phoneme id.
    CTXTTS_CHECK(config.tokenizer.num_tokens >= config.num_phonemes, errc::kInvalidConfig,
                 "phoneme-id tokens need K >= num_phonemes");
    for (size_t u = 0; u < corpus.records.size(); ++u) {
      UtteranceRecord& r = corpus.records[u];
      for (size_t s = 0; s < r.durations.size(); ++s) {
        r.tokens.insert(r.tokens.end(), r.durations[s], phone_ids[u][s]);
      }
    }
  }
  WriteManifest(corpus.manifest_path, corpus.records);
  return corpus;
}

}  // namespace ctxtts::data
