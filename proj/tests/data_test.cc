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

#include <filesystem>
#include <fstream>
#include <map>

#include "gtest/gtest.h"

#include "ctxtts/audio/features.h"
#include "ctxtts/audio/wav.h"
#include "ctxtts/common/error.h"
#include "ctxtts/data/manifest.h"
#include "ctxtts/data/tokenizer.h"
#include "ctxtts/data/toy_corpus.h"

namespace ctxtts::data {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  explicit TempDir(const std::string& name)
      : path_(fs::temp_directory_path() / ("ctxtts_" + name)) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }
  std::string str() const { return path_.string(); }

 private:
  fs::path path_;
};

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream(path) << text;
}

std::string ErrorMessage(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code() + ": " + e.what();
  }
  return "";
}

ManifestOptions NoAudio() {
  ManifestOptions o;
  o.check_audio = false;
  return o;
}

TEST(ManifestTest, EmptyFileGivesNoRecords) {
  TempDir dir("manifest_empty");
  WriteText(dir.file("m.jsonl"), "");
  EXPECT_TRUE(LoadManifest(dir.file("m.jsonl")).empty());
}

TEST(ManifestTest, RejectsDurationTokenMismatchWithLine) {
  TempDir dir("manifest_bad");
  WriteText(dir.file("m.jsonl"),
            R"({"utt_id":"a","audio":"a.wav","phonemes":"x y","durations":"1 2","tokens":"0 1 2"})"
            "\n"
            R"({"utt_id":"b","audio":"b.wav","phonemes":"x y","durations":"1 2","tokens":"0 1"})"
            "\n");
  const std::string msg = ErrorMessage([&] { LoadManifest(dir.file("m.jsonl"), NoAudio()); });
  EXPECT_NE(msg.find("manifest_error"), std::string::npos) << msg;
  EXPECT_NE(msg.find(":2:"), std::string::npos) << msg;
  EXPECT_NE(msg.find("durations sum to 3"), std::string::npos) << msg;
}

TEST(ManifestTest, RejectsMissingFieldAndBadAudio) {
  TempDir dir("manifest_fields");
  WriteText(dir.file("m.jsonl"), R"({"utt_id":"a","audio":"a.wav","durations":"1"})" "\n");
  EXPECT_NE(ErrorMessage([&] { LoadManifest(dir.file("m.jsonl"), NoAudio()); }).find(":1:"),
            std::string::npos);
  WriteText(dir.file("m.jsonl"),
            R"({"utt_id":"a","audio":"missing.wav","phonemes":"x","durations":"2","tokens":"0 0"})"
            "\n");
  EXPECT_NE(ErrorMessage([&] { LoadManifest(dir.file("m.jsonl")); }).find("unreadable audio"),
            std::string::npos);
  // Audio present but one frame too short.
  audio::WriteWav(dir.file("missing.wav"), std::vector<double>(160, 0.0), 16000);
  EXPECT_NE(ErrorMessage([&] { LoadManifest(dir.file("m.jsonl")); }).find("1 frames"),
            std::string::npos);
  audio::WriteWav(dir.file("missing.wav"), std::vector<double>(161, 0.0), 16000);
  EXPECT_EQ(LoadManifest(dir.file("m.jsonl")).size(), 1u);
}

TEST(ManifestTest, RoundTripIsIdentity) {
  TempDir dir("manifest_roundtrip");
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<UtteranceRecord> records;
    const int n = static_cast<int>(rng.UniformInt(0, 6));
    for (int i = 0; i < n; ++i) {
      UtteranceRecord r;
      r.utt_id = "utt" + std::to_string(trial) + "_" + std::to_string(i);
      r.audio_path = "wavs/" + r.utt_id + ".wav";
      const int phones = static_cast<int>(rng.UniformInt(1, 8));
      for (int p = 0; p < phones; ++p) {
        r.phonemes.push_back("P" + std::to_string(rng.UniformInt(0, 9)));
        r.durations.push_back(static_cast<int>(rng.UniformInt(0, 5)));
        for (int f = 0; f < r.durations.back(); ++f) {
          r.tokens.push_back(static_cast<int>(rng.UniformInt(0, 15)));
        }
      }
      if (rng.Bernoulli(0.5)) r.speaker_id = "spk" + std::to_string(i);
      if (rng.Bernoulli(0.3)) {
        r.tokens_path = r.utt_id + ".tok";
        WriteTokenFile(dir.file(r.tokens_path), r.tokens);
      }
      records.push_back(r);
    }
    WriteManifest(dir.file("m.jsonl"), records);
    EXPECT_EQ(LoadManifest(dir.file("m.jsonl"), NoAudio()), records);
  }
}

TEST(ManifestTest, PhonemeInventory) {
  UtteranceRecord a, b;
  a.phonemes = {"B", "A", "B"};
  b.phonemes = {"C", "A"};
  PhonemeInventory inv = PhonemeInventory::FromRecords({a, b});
  EXPECT_EQ(inv.size(), 3);
  EXPECT_EQ(inv.Ids({"B", "A", "C"}), (std::vector<int>{0, 1, 2}));
  EXPECT_THROW(inv.Id("Z"), Error);
}

TEST(TokenizerTest, UntrainedThrows) {
  KMeansTokenizer tok{TokenizerSpec{}};
  std::vector<double> x(1600, 0.1);
  try {
    tok.Tokenize(x);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::kUntrained);
  }
}

std::vector<double> Tone(double hz, int samples, double amp = 0.3) {
  std::vector<double> x(samples);
  for (int i = 0; i < samples; ++i) x[i] = amp * std::sin(2.0 * M_PI * hz * i / 16000.0);
  return x;
}

TEST(TokenizerTest, FitPropertiesAndPersistence) {
  TokenizerSpec spec;
  spec.num_tokens = 4;
  KMeansTokenizer tok(spec);
  std::vector<nn::Matrix> feats;
  for (double hz : {200.0, 700.0, 1500.0, 3000.0, 5000.0}) {
    feats.push_back(tok.Features(Tone(hz, 8000)));
  }
  Rng rng(1);
  std::vector<double> history = tok.Fit(feats, rng);
  ASSERT_FALSE(history.empty());
  for (size_t i = 1; i < history.size(); ++i) EXPECT_LE(history[i], history[i - 1]);

  // Constant signal maps to a constant token sequence away from the edges.
  std::vector<int> t = tok.Tokenize(Tone(700, 16000));
  ASSERT_EQ(t.size(), 100u);
  for (int i = 3; i < 97; ++i) EXPECT_EQ(t[i], t[50]);
  std::vector<int> silence = tok.Tokenize(std::vector<double>(3200, 0.0));
  for (int v : silence) EXPECT_EQ(v, silence[0]);

  TempDir dir("tokenizer");
  tok.Save(dir.file("tok.json"));
  KMeansTokenizer loaded = KMeansTokenizer::Load(dir.file("tok.json"));
  EXPECT_EQ(loaded.Tokenize(Tone(1234, 5000)), tok.Tokenize(Tone(1234, 5000)));

  // Same seed, same centroids.
  KMeansTokenizer again(spec);
  Rng rng2(1);
  again.Fit(feats, rng2);
  EXPECT_EQ(again.centroids(), tok.centroids());
}

TEST(TokenizerTest, TokenCountEqualsMelFrames) {
  TokenizerSpec spec;
  spec.num_tokens = 2;
  spec.num_ceps = 0;
  KMeansTokenizer tok(spec);
  Rng rng(2);
  tok.Fit({tok.Features(Tone(300, 4000)), tok.Features(Tone(3000, 4000))}, rng);
  audio::MelExtractor mel(spec.features);
  for (int n : {1, 159, 160, 161, 4321}) {
    std::vector<double> x = Tone(500, n);
    EXPECT_EQ(tok.Tokenize(x).size(), static_cast<size_t>(mel.Compute(x).num_frames()));
  }
}

ToyCorpusConfig SmallCorpus() {
  ToyCorpusConfig c;
  c.num_utterances = 6;
  c.min_frames = 120;
  c.max_frames = 160;
  c.min_phone_frames = 8;
  c.max_phone_frames = 16;
  return c;
}

TEST(ToyCorpusTest, DeterministicAndValid) {
  TempDir a("toy_a"), b("toy_b");
  Rng ra(42), rb(42);
  ToyCorpus ca = MakeToyCorpus(SmallCorpus(), ra, a.str());
  ToyCorpus cb = MakeToyCorpus(SmallCorpus(), rb, b.str());
  ASSERT_EQ(ca.records, cb.records);
  for (const UtteranceRecord& r : ca.records) {
    std::ifstream fa(a.file(r.audio_path), std::ios::binary);
    std::ifstream fb(b.file(r.audio_path), std::ios::binary);
    std::string sa((std::istreambuf_iterator<char>(fa)), {});
    std::string sb((std::istreambuf_iterator<char>(fb)), {});
    EXPECT_EQ(sa, sb) << r.utt_id;
  }
  ManifestOptions opts;
  opts.num_tokens = 16;
  std::vector<UtteranceRecord> loaded = LoadManifest(ca.manifest_path, opts);
  EXPECT_EQ(loaded, ca.records);
  for (size_t i = 1; i < ca.inertia_history.size(); ++i) {
    EXPECT_LE(ca.inertia_history[i], ca.inertia_history[i - 1]);
  }

  // Durations are a function of the phoneme.
  std::map<std::string, int> dur;
  for (const UtteranceRecord& r : loaded) {
    for (size_t s = 0; s < r.phonemes.size(); ++s) {
      auto [it, fresh] = dur.emplace(r.phonemes[s], r.durations[s]);
      EXPECT_EQ(it->second, r.durations[s]);
    }
  }

  // Re-tokenizing the written audio reproduces the manifest tokens.
  KMeansTokenizer tok = KMeansTokenizer::Load(ca.tokenizer_path);
  const UtteranceRecord& r = loaded.front();
  audio::Waveform w = audio::ReadWav(ResolvePath(ca.manifest_path, r.audio_path));
  EXPECT_EQ(tok.Tokenize(w.samples), r.tokens);

  Rng rc(43);
  TempDir c("toy_c");
  EXPECT_NE(MakeToyCorpus(SmallCorpus(), rc, c.str()).records, ca.records);
}

TEST(ToyCorpusTest, PhonemeIdTokens) {
  ToyCorpusConfig cfg = SmallCorpus();
  cfg.num_utterances = 2;
  cfg.tokenizer.kind = TokenizerSpec::Kind::kExternal;
  TempDir dir("toy_ext");
  Rng rng(3);
  ToyCorpus c = MakeToyCorpus(cfg, rng, dir.str());
  ManifestOptions opts;
  EXPECT_EQ(LoadManifest(c.manifest_path, opts), c.records);
}

}  // namespace
}  // namespace ctxtts::data
