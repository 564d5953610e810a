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
#include <numeric>
#include <sstream>

#include "gtest/gtest.h"
#include "json.hpp"

#include "ctxtts/audio/wav.h"
#include "ctxtts/common/error.h"
#include "ctxtts/data/toy_corpus.h"
#include "ctxtts/pipeline/cli.h"
#include "ctxtts/pipeline/pipeline.h"
#include "ctxtts/pipeline/secs.h"
#include "ctxtts/vec2wav/training.h"

namespace ctxtts::pipeline {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path TempDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string ReadFile(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

template <typename Fn>
std::string ErrorCode(Fn fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

TEST(Secs, IdenticalAudioScoresOne) {
  Rng rng(1);
  std::vector<double> wave(8000);
  for (double& s : wave) s = 0.1 * rng.Normal();
  const MelStatsEmbedder embedder;
  EXPECT_NEAR(ComputeSecs(embedder, wave, wave), 1.0, 1e-6);
  EXPECT_EQ(embedder.Embed(wave).size(), 160u);
  EXPECT_EQ(ErrorCode([&] { embedder.Embed({}); }), errc::kEmbedder);
  const std::vector<double> zero(4, 0.0), one = {1, 0, 0, 0}, neg = {-2, 0, 0, 0};
  EXPECT_EQ(ErrorCode([&] { CosineSimilarity(zero, one); }), errc::kEmbedder);
  EXPECT_EQ(CosineSimilarity(one, neg), -1.0);
}

TEST(Secs, ReportSchema) {
  SecsReport report;
  report.embedder = "mel-mean-var";
  report.Add({"a.wav", "b.wav", 0.5});
  report.Add({"c.wav", "d.wav", 1.0});
  EXPECT_DOUBLE_EQ(report.mean, 0.75);
  const auto lines = SecsReportLines(report);
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0].at("type"), "pair");
  EXPECT_EQ(lines[0].at("reference"), "a.wav");
  EXPECT_EQ(lines[0].at("generated"), "b.wav");
  EXPECT_EQ(lines[0].at("secs"), 0.5);
  EXPECT_EQ(lines[2].at("type"), "summary");
  EXPECT_EQ(lines[2].at("schema"), 1);
  EXPECT_EQ(lines[2].at("embedder"), "mel-mean-var");
  EXPECT_EQ(lines[2].at("count"), 2);
  EXPECT_EQ(lines[2].at("mean"), 0.75);
  const std::string text = FormatSecsReport(report);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
}

TEST(Secs, SameSpeakerScoresHigherOnToyCorpus) {
  const fs::path dir = TempDir("ctxtts_secs_corpus");
  data::ToyCorpusConfig tc;
  tc.num_utterances = 8;
  Rng rng(2);
  const auto corpus = data::MakeToyCorpus(tc, rng, dir.string());
  const MelStatsEmbedder embedder;
  std::vector<std::vector<double>> emb;
  for (const auto& r : corpus.records) {
    emb.push_back(
        embedder.Embed(audio::ReadWav(data::ResolvePath(corpus.manifest_path, r.audio_path))
                           .samples));
  }
  double same = 0, cross = 0;
  int ns = 0, nc = 0;
  for (size_t i = 0; i < emb.size(); ++i) {
    for (size_t j = i + 1; j < emb.size(); ++j) {
      const double s = CosineSimilarity(emb[i], emb[j]);
      if (corpus.records[i].speaker_id == corpus.records[j].speaker_id) {
        same += s;
        ++ns;
      } else {
        cross += s;
        ++nc;
      }
    }
  }
  EXPECT_GT(same / ns, cross / nc);
  fs::remove_all(dir);
}

// Untrained miniature models sharing the default 16 kHz, 10 ms framing.
struct MiniModels {
  txt2vec::Txt2VecConfig t2v;
  vec2wav::Vec2WavConfig v2w;
  data::PhonemeInventory inventory{{"AA", "IY", "S"}};

  MiniModels() {
    t2v.num_tokens = 6;
    t2v.num_phonemes = 3;
    t2v.d_model = 8;
    t2v.heads = 2;
    t2v.ffn_dim = 16;
    t2v.text_blocks = 1;
    t2v.decoder_blocks = 1;
    t2v.duration_channels = 8;
    t2v.steps = 8;
    v2w.num_tokens = 6;
    v2w.blocks = 1;
    v2w.d_model = 8;
    v2w.ffn_dim = 16;
    v2w.mel_channels = 8;
    v2w.generator_channels = 16;
    v2w.resblock_kernels = {3};
    v2w.resblock_dilations = {1};
  }

  EditPipeline Build(Rng& rng) const {
    txt2vec::LoadedTxt2Vec loaded;
    loaded.model = std::make_unique<txt2vec::Txt2VecModel>(t2v, rng);
    loaded.schedule = std::make_unique<diffusion::TransitionSchedule>(t2v.MakeSchedule());
    loaded.inventory = inventory;
    return EditPipeline(std::move(loaded), std::make_unique<vec2wav::Vec2WavModel>(v2w, rng));
  }
};

ContextInput MakeContext(std::vector<std::string> phonemes, std::vector<int> durations,
                         Rng& rng) {
  ContextInput c;
  c.phonemes = std::move(phonemes);
  c.durations = std::move(durations);
  const int frames = std::accumulate(c.durations.begin(), c.durations.end(), 0);
  c.samples.resize(static_cast<size_t>(frames) * 160);
  for (double& s : c.samples) s = 0.1 * rng.Normal();
  for (int i = 0; i < frames; ++i) c.tokens.push_back(static_cast<int>(rng.UniformInt(0, 5)));
  return c;
}

TEST(EditPipeline, EditWithoutContextBMatchesContinue) {
  MiniModels m;
  Rng rng(3);
  const EditPipeline p = m.Build(rng);
  EditRequest req;
  req.context_a = MakeContext({"AA", "S"}, {4, 3}, rng);
  req.target_phonemes = {"IY", "AA"};
  for (uint64_t seed = 0; seed < 5; ++seed) {
    req.seed = seed;
    const auto cont = p.RunContinue(req);
    const auto edit = p.RunEdit(req);
    EXPECT_EQ(cont.tokens, edit.tokens);
    EXPECT_EQ(cont.waveform, edit.waveform);
    EXPECT_EQ(p.RunEdit(req).tokens, edit.tokens);
    EXPECT_EQ(cont.waveform.size(), cont.tokens.size() * 160);
  }
}

TEST(EditPipeline, ContextsArePreserved) {
  MiniModels m;
  Rng rng(4);
  const EditPipeline p = m.Build(rng);
  EditRequest req;
  req.context_a = MakeContext({"AA", "S"}, {4, 3}, rng);
  req.context_b = MakeContext({"IY"}, {5}, rng);
  req.target_phonemes = {"S"};
  req.seed = 9;
  const auto out = p.RunEdit(req, false);
  const auto& a = req.context_a.tokens;
  const auto& b = req.context_b->tokens;
  ASSERT_EQ(out.edit.a_len, 7);
  ASSERT_EQ(out.edit.b_len, 5);
  EXPECT_TRUE(std::equal(a.begin(), a.end(), out.tokens.begin()));
  EXPECT_TRUE(std::equal(b.begin(), b.end(), out.tokens.end() - 5));
  EXPECT_TRUE(out.waveform.empty());
  EXPECT_EQ(ErrorCode([&] { p.RunContinue(req); }), errc::kInvalidArgument);
}

TEST(EditPipeline, RejectsBadRequests) {
  MiniModels m;
  Rng rng(5);
  const EditPipeline p = m.Build(rng);
  EditRequest req;
  req.context_a = MakeContext({"AA", "S"}, {4, 3}, rng);
  req.target_phonemes = {"IY"};
  EditRequest missing = req;
  missing.context_a.durations = {4};
  EXPECT_EQ(ErrorCode([&] { p.RunEdit(missing); }), errc::kInvalidArgument);
  EditRequest wrong_sum = req;
  wrong_sum.context_a.durations = {4, 4};
  EXPECT_EQ(ErrorCode([&] { p.RunEdit(wrong_sum); }), errc::kLengthMismatch);
  EditRequest unknown = req;
  unknown.target_phonemes = {"ZZ"};
  EXPECT_EQ(ErrorCode([&] { p.RunEdit(unknown); }), errc::kUnknownPhoneme);
  EditRequest untokenized = req;
  untokenized.context_a.tokens.clear();
  EXPECT_EQ(ErrorCode([&] { p.RunEdit(untokenized); }), errc::kInvalidArgument);
}

TEST(EditPipeline, MismatchedPartsAreRejected) {
  Rng rng(6);
  MiniModels k;
  k.v2w.num_tokens = 7;
  EXPECT_EQ(ErrorCode([&] { k.Build(rng); }), errc::kCheckpointMismatch);
  MiniModels rate;
  rate.t2v.frame_rate = 50.0;
  EXPECT_EQ(ErrorCode([&] { rate.Build(rng); }), errc::kCheckpointMismatch);
}

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult Cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = RunCli(args, out, err);
  return {code, out.str(), err.str()};
}

void ExpectSingleErrorLine(const CliResult& r, const std::string& code) {
  EXPECT_NE(r.code, 0);
  ASSERT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1) << r.err;
  const json j = json::parse(r.err);
  EXPECT_EQ(j.at("error"), code) << r.err;
  EXPECT_TRUE(j.contains("message"));
}

TEST(Cli, UsageErrorsAreSingleJsonLines) {
  ExpectSingleErrorLine(Cli({}), "usage");
  ExpectSingleErrorLine(Cli({"train-txt2vec", "--bogus"}), "usage");
  ExpectSingleErrorLine(Cli({"fly"}), "usage");
  const fs::path dir = TempDir("ctxtts_cli_errors");
  std::ofstream(dir / "bad.json") << "{ not json";
  ExpectSingleErrorLine(Cli({"make-toy-corpus", "--out", (dir / "c").string(), "--config",
                             (dir / "bad.json").string()}),
                        errc::kInvalidConfig);
  std::ofstream(dir / "typed.json") << R"({"toy_corpus": {"num_utterances": "many"}})";
  ExpectSingleErrorLine(Cli({"make-toy-corpus", "--out", (dir / "c").string(), "--config",
                             (dir / "typed.json").string()}),
                        errc::kInvalidConfig);
  EXPECT_EQ(Cli({"--help"}).code, 0);
  fs::remove_all(dir);
}

TEST(Cli, ToyPipelineEndToEnd) {
  const fs::path dir = TempDir("ctxtts_cli_pipeline");
  const json config = {
      {"toy_corpus", {{"num_utterances", 3}}},
      {"txt2vec",
       {{"model",
         {{"d_model", 8}, {"heads", 2}, {"ffn_dim", 16}, {"text_blocks", 1},
          {"decoder_blocks", 1}, {"duration_channels", 8}, {"steps", 6}}},
        {"train", {{"max_steps", 3}, {"warmup_steps", 1}, {"log_every", 1}}}}},
      {"vec2wav",
       {{"model",
         {{"blocks", 1}, {"d_model", 8}, {"ffn_dim", 16}, {"mel_channels", 8},
          {"generator_channels", 16}, {"resblock_kernels", {3}}, {"resblock_dilations", {1}},
          {"disc_channels", 4}, {"crop_frames", 8}, {"warmup_steps", 1}}},
        {"train", {{"max_steps", 2}, {"log_every", 1}}}}}};
  const std::string cfg = (dir / "config.json").string();
  std::ofstream(cfg) << config.dump();
  const std::string corpus = (dir / "corpus").string();
  const std::string manifest = corpus + "/manifest.jsonl";
  const std::string tokenizer = corpus + "/tokenizer.json";
  const std::string t2v = (dir / "t2v.ckpt").string();
  const std::string v2w = (dir / "v2w.ckpt").string();

  auto r = Cli({"make-toy-corpus", "--out", corpus, "--config", cfg, "--seed", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  r = Cli({"train-txt2vec", "--manifest", manifest, "--config", cfg, "--checkpoint", t2v});
  ASSERT_EQ(r.code, 0) << r.err;
  r = Cli({"train-vec2wav", "--manifest", manifest, "--config", cfg, "--checkpoint", v2w});
  ASSERT_EQ(r.code, 0) << r.err;

  // Context A is the first two phonemes of the first utterance.
  const auto records = data::LoadManifest(manifest);
  const auto& rec = records[0];
  const int frames = rec.durations[0] + rec.durations[1];
  const auto wave = audio::ReadWav(data::ResolvePath(manifest, rec.audio_path));
  const std::string ctx = (dir / "ctx.wav").string();
  audio::WriteWav(ctx, std::span(wave.samples).first(static_cast<size_t>(frames) * 160), 16000);
  const std::string phonemes = rec.phonemes[0] + " " + rec.phonemes[1];
  const std::string durations =
      std::to_string(rec.durations[0]) + " " + std::to_string(rec.durations[1]);
  const std::string target = rec.phonemes[2] + " " + rec.phonemes[3];

  auto run = [&](const std::string& cmd, const std::string& tokens_out, const std::string& out) {
    return Cli({cmd, "--checkpoint", t2v, "--vocoder", v2w, "--tokenizer", tokenizer,
                "--context-a", ctx, "--phonemes-a", phonemes, "--durations-a", durations,
                "--target", target, "--seed", "7", "--tokens-out", tokens_out, "--out", out});
  };
  const fs::path cont_tokens = dir / "cont.txt", edit_tokens = dir / "edit.txt",
                 again_tokens = dir / "again.txt";
  const std::string cont_wav = (dir / "cont.wav").string();
  r = run("continue", cont_tokens.string(), cont_wav);
  ASSERT_EQ(r.code, 0) << r.err;
  const json cont = json::parse(r.out);
  EXPECT_EQ(cont.at("a_len"), frames);
  r = run("edit", edit_tokens.string(), (dir / "edit.wav").string());
  ASSERT_EQ(r.code, 0) << r.err;
  r = run("edit", again_tokens.string(), (dir / "again.wav").string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(ReadFile(cont_tokens), ReadFile(edit_tokens));
  EXPECT_EQ(ReadFile(edit_tokens), ReadFile(again_tokens));
  EXPECT_EQ(ReadFile(dir / "cont.wav"), ReadFile(dir / "edit.wav"));

  r = Cli({"resynth", "--checkpoint", v2w, "--input", ctx, "--tokenizer", tokenizer, "--out",
           (dir / "resynth.wav").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(audio::ReadWav((dir / "resynth.wav").string()).samples.size(),
            static_cast<size_t>(frames) * 160);

  const std::string report = (dir / "secs.jsonl").string();
  r = Cli({"eval-secs", "--reference", ctx, "--generated", ctx, "--report", report});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(ReadFile(report));
  std::string first, summary;
  std::getline(lines, first);
  std::getline(lines, summary);
  EXPECT_NEAR(json::parse(first).at("secs").get<double>(), 1.0, 1e-6);
  EXPECT_EQ(json::parse(summary).at("count"), 1);

  // A vocoder with a different K is refused.
  const std::string other = (dir / "other.ckpt").string();
  vec2wav::Vec2WavConfig vc = vec2wav::LoadVec2Wav(v2w)->config();
  vc.num_tokens += 1;
  Rng rng(0);
  vec2wav::SaveVec2Wav(other, vec2wav::Vec2WavModel(vc, rng));
  r = Cli({"continue", "--checkpoint", t2v, "--vocoder", other, "--tokenizer", tokenizer,
           "--context-a", ctx, "--phonemes-a", phonemes, "--durations-a", durations, "--target",
           target});
  ExpectSingleErrorLine(r, errc::kCheckpointMismatch);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace ctxtts::pipeline
