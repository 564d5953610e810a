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

#include "ctxtts/pipeline/cli.h"

#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "ctxtts/audio/wav.h"
#include "ctxtts/common/error.h"
#include "ctxtts/data/manifest.h"
#include "ctxtts/data/toy_corpus.h"
#include "ctxtts/pipeline/pipeline.h"
#include "ctxtts/pipeline/secs.h"
#include "ctxtts/txt2vec/trainer.h"
#include "ctxtts/vec2wav/training.h"

namespace ctxtts::pipeline {

using nlohmann::json;

namespace {

struct CommonOptions {
  std::string config;
  uint64_t seed = 0;
  std::string checkpoint;
};

void AddCommon(CLI::App* app, CommonOptions* o, bool checkpoint_required) {
  app->add_option("--config", o->config, "JSON config file")->check(CLI::ExistingFile);
  app->add_option("--seed", o->seed, "root random seed");
  auto* ck = app->add_option("--checkpoint", o->checkpoint, "checkpoint path");
  if (checkpoint_required) ck->required();
}

json Section(const CommonOptions& o, const std::string& name) {
  if (o.config.empty()) return json::object();
  std::ifstream in(o.config);
  CTXTTS_CHECK(in.good(), errc::kIo, "cannot open " + o.config);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(errc::kInvalidConfig, o.config + ": " + e.what());
  }
  CTXTTS_CHECK(j.is_object(), errc::kInvalidConfig, o.config + ": expected a JSON object");
  return j.value(name, json::object());
}

std::vector<std::string> SplitWords(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

std::vector<int> SplitInts(const std::string& s, const std::string& what) {
  std::vector<int> out;
  for (const auto& w : SplitWords(s)) {
    try {
      size_t used = 0;
      out.push_back(std::stoi(w, &used));
      CTXTTS_CHECK(used == w.size(), errc::kInvalidArgument, what + ": bad integer " + w);
    } catch (const std::logic_error&) {
      throw Error(errc::kInvalidArgument, what + ": bad integer " + w);
    }
  }
  return out;
}

int MaxToken(const std::vector<data::UtteranceRecord>& records) {
  int k = 0;
  for (const auto& r : records) {
    for (int t : r.tokens) k = std::max(k, t + 1);
  }
  return k;
}

// --- make-toy-corpus --------------------------------------------------------

struct ToyArgs {
  CommonOptions common;
  std::string out_dir;
};

void MakeToy(const ToyArgs& a, std::ostream& out) {
  const auto cfg = Section(a.common, "toy_corpus").get<data::ToyCorpusConfig>();
  Rng rng(a.common.seed);
  const data::ToyCorpus corpus = data::MakeToyCorpus(cfg, rng, a.out_dir);
  if (!a.common.checkpoint.empty()) {
    std::filesystem::copy_file(corpus.tokenizer_path, a.common.checkpoint,
                               std::filesystem::copy_options::overwrite_existing);
  }
  out << json{{"command", "make-toy-corpus"},
              {"manifest", corpus.manifest_path},
              {"tokenizer", corpus.tokenizer_path},
              {"utterances", corpus.records.size()}}
             .dump()
      << "\n";
}

// --- train-txt2vec ----------------------------------------------------------

struct TrainArgs {
  CommonOptions common;
  std::string manifest;
};

void TrainT2V(const TrainArgs& a, std::ostream& out) {
  const json section = Section(a.common, "txt2vec");
  auto model_cfg = section.value("model", json::object()).get<txt2vec::Txt2VecConfig>();
  const auto train_cfg = section.value("train", json::object()).get<txt2vec::Txt2VecTrainConfig>();
  const auto records = data::LoadManifest(a.manifest);
  CTXTTS_CHECK(!records.empty(), errc::kManifest, a.manifest + ": no utterances");
  const auto inventory = data::PhonemeInventory::FromRecords(records);
  if (model_cfg.num_tokens == 0) model_cfg.num_tokens = MaxToken(records);
  if (model_cfg.num_phonemes == 0) model_cfg.num_phonemes = inventory.size();
  model_cfg.Validate();
  const auto examples = txt2vec::ExamplesFromRecords(records, inventory, model_cfg.num_tokens);

  Rng root(a.common.seed);
  Rng init = root.Child(1), train = root.Child(2);
  txt2vec::Txt2VecModel model(model_cfg, init);
  const auto sched = model_cfg.MakeSchedule();
  auto log = [&](const txt2vec::TrainProgress& p) {
    out << json{{"step", p.step},         {"seconds", p.seconds},
                {"lr", p.learning_rate},  {"loss", p.loss.total},
                {"duration", p.loss.duration}, {"diffusion", p.loss.diffusion},
                {"ce", p.loss.aux},       {"accuracy", p.loss.accuracy}}
               .dump()
        << "\n";
  };
  const auto summary = txt2vec::TrainTxt2Vec(&model, sched, examples, train_cfg, train, log);
  txt2vec::SaveTxt2Vec(a.common.checkpoint, model, sched, inventory);
  out << json{{"command", "train-txt2vec"},
              {"checkpoint", a.common.checkpoint},
              {"steps", summary.steps},
              {"seconds", summary.seconds}}
             .dump()
      << "\n";
}

// --- train-vec2wav ----------------------------------------------------------

void TrainV2W(const TrainArgs& a, std::ostream& out) {
  const json section = Section(a.common, "vec2wav");
  auto model_cfg = section.value("model", json::object()).get<vec2wav::Vec2WavConfig>();
  const auto train_cfg = section.value("train", json::object()).get<vec2wav::Vec2WavTrainConfig>();
  const auto records = data::LoadManifest(a.manifest);
  CTXTTS_CHECK(!records.empty(), errc::kManifest, a.manifest + ": no utterances");
  if (model_cfg.num_tokens == 0) model_cfg.num_tokens = MaxToken(records);
  const auto examples = vec2wav::ExamplesFromRecords(records, a.manifest, model_cfg.features);
  vec2wav::FitAuxNormalization(examples, &model_cfg);
  model_cfg.Validate();

  Rng root(a.common.seed);
  Rng init = root.Child(1), train = root.Child(2);
  vec2wav::Vec2WavModel model(model_cfg, init);
  vec2wav::Discriminators disc(model_cfg, init);
  auto log = [&](const vec2wav::Vec2WavProgress& p) {
    out << json{{"step", p.step},
                {"seconds", p.seconds},
                {"lr", p.learning_rate},
                {"loss", p.loss.total},
                {"mel", p.loss.mel},
                {"aux", p.loss.aux},
                {"adversarial", p.loss.adversarial},
                {"feature", p.loss.feature},
                {"discriminator", p.disc_loss}}
               .dump()
        << "\n";
  };
  const auto summary = vec2wav::TrainVec2Wav(&model, &disc, examples, train_cfg, train, log);
  vec2wav::SaveVec2Wav(a.common.checkpoint, model);
  out << json{{"command", "train-vec2wav"},
              {"checkpoint", a.common.checkpoint},
              {"steps", summary.steps},
              {"skipped", summary.skipped},
              {"seconds", summary.seconds}}
             .dump()
      << "\n";
}

// --- resynth ----------------------------------------------------------------

struct ResynthArgs {
  CommonOptions common;
  std::string input;
  std::string tokenizer;
  std::string tokens;
  std::string prompt;
  std::string output;
};

void Resynth(const ResynthArgs& a, std::ostream& out) {
  const auto model = vec2wav::LoadVec2Wav(a.common.checkpoint);
  const auto& features = model->config().features;
  const audio::Waveform input = audio::ReadWav(a.input);
  std::vector<int> tokens;
  if (!a.tokens.empty()) {
    tokens = data::ReadTokenFile(a.tokens);
  } else {
    CTXTTS_CHECK(!a.tokenizer.empty(), errc::kInvalidArgument,
                 "resynth needs --tokens or --tokenizer");
    const auto tokenizer = data::KMeansTokenizer::Load(a.tokenizer);
    CTXTTS_CHECK(tokenizer.spec().num_tokens == model->config().num_tokens,
                 errc::kCheckpointMismatch, "tokenizer K differs from the vocoder's K");
    tokens = tokenizer.Tokenize(input.samples);
  }
  const audio::Waveform prompt = a.prompt.empty() ? input : audio::ReadWav(a.prompt);
  CTXTTS_CHECK(prompt.sample_rate == features.sample_rate, errc::kInvalidArgument,
               "prompt sample rate differs from the vocoder's");
  const auto wave = model->Synthesize(tokens, model->mel_extractor().Compute(prompt.samples).frames);
  audio::WriteWav(a.output, wave, features.sample_rate);
  out << json{{"command", "resynth"}, {"output", a.output}, {"frames", tokens.size()}}.dump()
      << "\n";
}

// --- continue / edit --------------------------------------------------------

struct ContextArgs {
  std::string audio;
  std::string phonemes;
  std::string durations;
  std::string tokens;
};

struct EditArgs {
  CommonOptions common;
  std::string vocoder;
  std::string tokenizer;
  ContextArgs a;
  ContextArgs b;
  std::string target;
  std::string output;
  std::string tokens_out;
  double temperature = 1.0;
  bool no_vocode = false;
};

void AddContext(CLI::App* app, const std::string& tag, ContextArgs* c, bool required) {
  auto* audio = app->add_option("--context-" + tag, c->audio, "context WAV");
  auto* ph = app->add_option("--phonemes-" + tag, c->phonemes, "space-separated phonemes");
  auto* du = app->add_option("--durations-" + tag, c->durations, "frames per phoneme");
  app->add_option("--tokens-" + tag, c->tokens, "token file; default: tokenize the audio");
  if (required) {
    audio->required();
    ph->required();
    du->required();
  }
}

ContextInput LoadContext(const ContextArgs& c, const std::string& tag) {
  CTXTTS_CHECK(!c.phonemes.empty(), errc::kInvalidArgument, "--phonemes-" + tag + " is required");
  CTXTTS_CHECK(!c.durations.empty(), errc::kInvalidArgument,
               "--durations-" + tag + " is required");
  ContextInput in;
  in.samples = audio::ReadWav(c.audio).samples;
  in.phonemes = SplitWords(c.phonemes);
  in.durations = SplitInts(c.durations, "--durations-" + tag);
  if (!c.tokens.empty()) in.tokens = data::ReadTokenFile(c.tokens);
  return in;
}

void RunEditCommand(const EditArgs& a, bool is_edit, std::ostream& out) {
  const EditPipeline pipeline = EditPipeline::Load(a.common.checkpoint, a.vocoder, a.tokenizer);
  EditRequest req;
  req.context_a = LoadContext(a.a, "a");
  if (is_edit && !a.b.audio.empty()) req.context_b = LoadContext(a.b, "b");
  req.target_phonemes = SplitWords(a.target);
  CTXTTS_CHECK(!req.target_phonemes.empty(), errc::kInvalidArgument, "--target is empty");
  req.output_path = a.no_vocode ? std::string() : a.output;
  req.seed = a.common.seed;
  req.temperature = a.temperature;
  const EditOutput result = is_edit ? pipeline.RunEdit(req, !a.no_vocode)
                                    : pipeline.RunContinue(req, !a.no_vocode);
  if (!a.tokens_out.empty()) data::WriteTokenFile(a.tokens_out, result.tokens);
  out << json{{"command", is_edit ? "edit" : "continue"},
              {"tokens", result.tokens},
              {"a_len", result.edit.a_len},
              {"x_len", result.edit.x_len},
              {"b_len", result.edit.b_len},
              {"alpha", result.edit.alpha},
              {"durations", result.edit.durations},
              {"output", req.output_path}}
             .dump()
      << "\n";
}

// --- eval-secs --------------------------------------------------------------

struct SecsArgs {
  CommonOptions common;
  std::vector<std::string> reference;
  std::vector<std::string> generated;
  std::string report;
};

void EvalSecs(const SecsArgs& a, std::ostream& out) {
  CTXTTS_CHECK(a.reference.size() == a.generated.size(), errc::kInvalidArgument,
               "--reference and --generated must pair up");
  audio::FeatureConfig features = Section(a.common, "features").get<audio::FeatureConfig>();
  if (!a.common.checkpoint.empty()) {
    features = vec2wav::LoadVec2Wav(a.common.checkpoint)->config().features;
  }
  const MelStatsEmbedder embedder(features);
  SecsReport report;
  report.embedder = embedder.name();
  for (size_t i = 0; i < a.reference.size(); ++i) {
    const auto ref = audio::ReadWav(a.reference[i]);
    const auto gen = audio::ReadWav(a.generated[i]);
    report.Add({a.reference[i], a.generated[i], ComputeSecs(embedder, ref.samples, gen.samples)});
  }
  const std::string text = FormatSecsReport(report);
  if (a.report.empty()) {
    out << text;
  } else {
    std::ofstream f(a.report);
    CTXTTS_CHECK(f.good(), errc::kIo, "cannot write " + a.report);
    f << text;
    out << json{{"command", "eval-secs"}, {"report", a.report}, {"mean", report.mean}}.dump()
        << "\n";
  }
}

void PrintError(std::ostream& err, const std::string& code, const std::string& message) {
  err << json{{"error", code}, {"message", message}}.dump() << "\n";
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Contextual token-diffusion speech synthesis toolkit", "ctxtts");
  app.require_subcommand(1);

  ToyArgs toy;
  auto* toy_cmd = app.add_subcommand("make-toy-corpus", "write the synthetic toy corpus");
  AddCommon(toy_cmd, &toy.common, false);
  toy_cmd->add_option("--out", toy.out_dir, "output directory")->required();

  TrainArgs t2v;
  auto* t2v_cmd = app.add_subcommand("train-txt2vec", "train the token generator");
  AddCommon(t2v_cmd, &t2v.common, true);
  t2v_cmd->add_option("--manifest", t2v.manifest, "JSON-lines manifest")->required();

  TrainArgs v2w;
  auto* v2w_cmd = app.add_subcommand("train-vec2wav", "train the vocoder");
  AddCommon(v2w_cmd, &v2w.common, true);
  v2w_cmd->add_option("--manifest", v2w.manifest, "JSON-lines manifest")->required();

  ResynthArgs rs;
  auto* rs_cmd = app.add_subcommand("resynth", "vocode the tokens of an utterance");
  AddCommon(rs_cmd, &rs.common, true);
  rs_cmd->add_option("--input", rs.input, "source WAV")->required();
  rs_cmd->add_option("--tokenizer", rs.tokenizer, "tokenizer JSON");
  rs_cmd->add_option("--tokens", rs.tokens, "token file");
  rs_cmd->add_option("--prompt", rs.prompt, "prompt WAV; default: the input");
  rs_cmd->add_option("--out", rs.output, "output WAV")->required();

  EditArgs cont, edit;
  auto* cont_cmd = app.add_subcommand("continue", "continue an utterance");
  auto* edit_cmd = app.add_subcommand("edit", "replace the middle of an utterance");
  for (auto [cmd, a] : {std::pair{cont_cmd, &cont}, std::pair{edit_cmd, &edit}}) {
    AddCommon(cmd, &a->common, true);
    cmd->add_option("--vocoder", a->vocoder, "vec2wav checkpoint")->required();
    cmd->add_option("--tokenizer", a->tokenizer, "tokenizer JSON for context audio");
    AddContext(cmd, "a", &a->a, true);
    cmd->add_option("--target", a->target, "space-separated phonemes to generate")->required();
    cmd->add_option("--out", a->output, "output WAV");
    cmd->add_option("--tokens-out", a->tokens_out, "write the full token sequence here");
    cmd->add_option("--temperature", a->temperature, "sampling temperature");
    cmd->add_flag("--no-vocode", a->no_vocode, "stop after token generation");
  }
  AddContext(edit_cmd, "b", &edit.b, false);

  SecsArgs secs;
  auto* secs_cmd = app.add_subcommand("eval-secs", "speaker similarity of WAV pairs");
  AddCommon(secs_cmd, &secs.common, false);
  secs_cmd->add_option("--reference", secs.reference, "reference WAVs")->required();
  secs_cmd->add_option("--generated", secs.generated, "generated WAVs")->required();
  secs_cmd->add_option("--report", secs.report, "JSON-lines report; default stdout");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    PrintError(err, "usage", e.what());
    return 2;
  }

  try {
    if (*toy_cmd) MakeToy(toy, out);
    if (*t2v_cmd) TrainT2V(t2v, out);
    if (*v2w_cmd) TrainV2W(v2w, out);
    if (*rs_cmd) Resynth(rs, out);
    if (*cont_cmd) RunEditCommand(cont, false, out);
    if (*edit_cmd) RunEditCommand(edit, true, out);
    if (*secs_cmd) EvalSecs(secs, out);
  } catch (const Error& e) {
    PrintError(err, e.code(), e.what());
    return 1;
  } catch (const json::exception& e) {
    PrintError(err, errc::kInvalidConfig, e.what());
    return 1;
  } catch (const std::exception& e) {
    PrintError(err, "internal", e.what());
    return 1;
  }
  return 0;
}

}  // namespace ctxtts::pipeline
