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

#include "ctxtts/vec2wav/training.h"

#include <chrono>
#include <cmath>

#include <glog/logging.h>

#include "ctxtts/audio/wav.h"
#include "ctxtts/common/error.h"
#include "ctxtts/nn/checkpoint.h"
#include "ctxtts/nn/ops.h"
#include "ctxtts/nn/optim.h"

namespace ctxtts::vec2wav {

using nlohmann::json;
using nn::Matrix;
using nn::Tensor;

namespace {

Tensor MeanAbsDiff(const Tensor& a, const Tensor& b) { return nn::Mean(nn::Abs(nn::Sub(a, b))); }

Tensor WaveTensor(const std::vector<double>& wave) {
  Matrix m(static_cast<Eigen::Index>(wave.size()), 1);
  for (size_t i = 0; i < wave.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = wave[i];
  return Tensor(m);
}

double CosineRate(double peak, double floor, int step, int max_steps) {
  const double progress = std::min(1.0, static_cast<double>(step) / std::max(1, max_steps));
  return floor + 0.5 * (peak - floor) * (1.0 + std::cos(M_PI * progress));
}

void AddParts(GeneratorLossBreakdown* acc, const GeneratorLossBreakdown& p, double w) {
  acc->total += w * p.total;
  acc->adversarial += w * p.adversarial;
  acc->feature += w * p.feature;
  acc->mel += w * p.mel;
  acc->aux += w * p.aux;
}

}  // namespace

std::vector<Vec2WavExample> ExamplesFromRecords(const std::vector<data::UtteranceRecord>& records,
                                                const std::string& manifest_path,
                                                const audio::FeatureConfig& features) {
  audio::MelExtractor mel(features);
  audio::AutocorrelationAuxExtractor aux(features);
  std::vector<Vec2WavExample> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    audio::Waveform w = audio::ReadWav(data::ResolvePath(manifest_path, r.audio_path));
    CTXTTS_CHECK(w.sample_rate == features.sample_rate, errc::kInvalidArgument,
                 r.utt_id + ": sample rate differs from the feature config");
    Vec2WavExample ex;
    ex.utt_id = r.utt_id;
    ex.tokens = r.tokens;
    ex.mel = mel.Compute(w.samples).frames;
    ex.aux = aux.Extract(w.samples);
    CTXTTS_CHECK(ex.mel.rows() == ex.num_frames(), errc::kLengthMismatch,
                 r.utt_id + ": token count differs from the mel frame count");
    ex.wave = std::move(w.samples);
    ex.wave.resize(static_cast<size_t>(ex.num_frames()) * features.hop, 0.0);
    out.push_back(std::move(ex));
  }
  return out;
}

void FitAuxNormalization(const std::vector<Vec2WavExample>& examples, Vec2WavConfig* config) {
  std::array<double, 3> sum{}, sq{};
  double n = 0;
  for (const auto& ex : examples) {
    for (int i = 0; i < ex.aux.num_frames(); ++i) {
      const double v[3] = {std::log(ex.aux.pitch(i)), ex.aux.energy(i), ex.aux.pov(i)};
      for (int d = 0; d < 3; ++d) {
        sum[d] += v[d];
        sq[d] += v[d] * v[d];
      }
      n += 1;
    }
  }
  CTXTTS_CHECK(n > 0, errc::kInvalidArgument, "no frames to fit aux normalization");
  for (int d = 0; d < 3; ++d) {
    const double mean = sum[d] / n;
    config->aux_mean[d] = mean;
    config->aux_std[d] = std::max(1e-3, std::sqrt(std::max(0.0, sq[d] / n - mean * mean)));
  }
}

std::optional<PromptSplit> SplitForTraining(int num_frames, const Vec2WavConfig& c, Rng& rng) {
  const double rate = static_cast<double>(c.features.sample_rate) / c.hop();
  const int lo = static_cast<int>(std::lround(c.prompt_min_seconds * rate));
  const int hi = static_cast<int>(std::lround(c.prompt_max_seconds * rate));
  if (num_frames < hi + c.min_target_frames) return std::nullopt;
  PromptSplit s;
  s.prompt_frames = static_cast<int>(rng.UniformInt(lo, hi));
  s.target_frames = num_frames - s.prompt_frames;
  return s;
}

std::optional<TrainingCrop> SampleCrop(const Vec2WavExample& ex, const Vec2WavConfig& c,
                                       Rng& rng) {
  const auto split = SplitForTraining(ex.num_frames(), c, rng);
  if (!split) return std::nullopt;
  const int p = split->prompt_frames;
  const int target = split->target_frames;
  TrainingCrop crop;
  crop.prompt_mel = ex.mel.topRows(p);
  crop.tokens.assign(ex.tokens.begin() + p, ex.tokens.end());
  audio::AuxiliaryFeatures aux;
  aux.values = ex.aux.values.bottomRows(target);
  crop.aux = NormalizeAux(aux, c);
  crop.crop_frames = std::min(c.crop_frames, target);
  crop.crop_start = static_cast<int>(rng.UniformInt(0, target - crop.crop_frames));
  const int hop = c.hop();
  const long first = static_cast<long>(p + crop.crop_start) * hop;
  crop.wave.assign(ex.wave.begin() + first,
                   ex.wave.begin() + first + static_cast<long>(crop.crop_frames) * hop);
  return crop;
}

GeneratorForward GeneratorLoss(const Vec2WavModel& model, const Discriminators* discriminators,
                               const TrainingCrop& crop, int step) {
  const Vec2WavConfig& c = model.config();
  GeneratorForward out;
  EncoderOutput enc = model.Encode(crop.tokens, crop.prompt_mel, &crop.aux);
  out.fake = model.generator().Forward(
      nn::SliceRows(enc.hidden, crop.crop_start, crop.crop_frames));

  const Tensor real_mel(model.mel_extractor().Compute(crop.wave).frames);
  Tensor mel = MeanAbsDiff(model.mel_extractor().ComputeDifferentiable(out.fake), real_mel);
  Tensor aux = MeanAbsDiff(enc.aux, Tensor(crop.aux));
  Tensor total = nn::Add(nn::Scale(mel, c.mel_weight), nn::Scale(aux, c.aux_weight));
  out.parts.mel = mel.value()(0, 0);
  out.parts.aux = aux.value()(0, 0);

  if (discriminators != nullptr && step >= c.warmup_steps) {
    const Tensor real = WaveTensor(crop.wave);
    const auto fake_out = discriminators->Forward(out.fake);
    const auto real_out = discriminators->Forward(real);
    Tensor adv = Tensor(Matrix::Zero(1, 1));
    Tensor fm = Tensor(Matrix::Zero(1, 1));
    for (size_t d = 0; d < fake_out.size(); ++d) {
      adv = nn::Add(adv, nn::Mean(nn::Square(nn::AddScalar(fake_out[d].score, -1.0))));
      for (size_t f = 0; f < fake_out[d].features.size(); ++f) {
        fm = nn::Add(fm, MeanAbsDiff(fake_out[d].features[f], real_out[d].features[f].Detach()));
      }
    }
    total = nn::Add(total, nn::Add(adv, nn::Scale(fm, c.feature_weight)));
    out.parts.adversarial = adv.value()(0, 0);
    out.parts.feature = fm.value()(0, 0);
  }
  out.parts.total = total.value()(0, 0);
  out.loss = total;
  return out;
}

Tensor DiscriminatorLoss(const Discriminators& discriminators, const Tensor& real,
                         const Tensor& fake) {
  const auto r = discriminators.Forward(real);
  const auto f = discriminators.Forward(fake.Detach());
  Tensor loss = Tensor(Matrix::Zero(1, 1));
  for (size_t d = 0; d < r.size(); ++d) {
    loss = nn::Add(loss, nn::Mean(nn::Square(nn::AddScalar(r[d].score, -1.0))));
    loss = nn::Add(loss, nn::Mean(nn::Square(f[d].score)));
  }
  return loss;
}

Vec2WavSummary TrainVec2Wav(Vec2WavModel* model, Discriminators* discriminators,
                            const std::vector<Vec2WavExample>& examples,
                            const Vec2WavTrainConfig& config, Rng& rng,
                            const std::function<void(const Vec2WavProgress&)>& on_log) {
  CTXTTS_CHECK(!examples.empty(), errc::kInvalidArgument, "no training examples");
  CTXTTS_CHECK(config.max_steps >= 0, errc::kInvalidConfig, "max_steps must be non-negative");
  nn::AdamOptions g_opt;
  g_opt.lr = config.learning_rate;
  g_opt.beta1 = config.beta1;
  g_opt.beta2 = config.beta2;
  g_opt.weight_decay = config.weight_decay;
  g_opt.clip_norm = config.clip_norm;
  nn::Adam g_adam(model->Parameters(), g_opt);
  nn::AdamOptions d_opt = g_opt;
  d_opt.lr = config.disc_learning_rate;
  nn::Adam d_adam(discriminators->Parameters(), d_opt);

  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  Vec2WavSummary summary;
  GeneratorLossBreakdown window;
  double window_disc = 0.0;
  int window_count = 0;
  const int max_draws = 100 * static_cast<int>(examples.size());
  for (int step = 0; step < config.max_steps; ++step) {
    if (config.time_limit_seconds > 0.0 && elapsed() >= config.time_limit_seconds) break;
    std::optional<TrainingCrop> crop;
    for (int draw = 0; !crop; ++draw) {
      CTXTTS_CHECK(draw < max_draws, errc::kInvalidArgument,
                   "no utterance is long enough for the prompt/target split");
      const auto& ex = examples[rng.UniformInt(0, static_cast<int64_t>(examples.size()) - 1)];
      crop = SampleCrop(ex, model->config(), rng);
      if (!crop) ++summary.skipped;
    }
    const double factor =
        CosineRate(1.0, config.min_learning_rate / config.learning_rate, step, config.max_steps);
    g_adam.set_lr(config.learning_rate * factor);
    d_adam.set_lr(config.disc_learning_rate * factor);

    GeneratorForward g = GeneratorLoss(*model, discriminators, *crop, step);
    g.loss.Backward();
    g_adam.Step();
    d_adam.ZeroGrad();
    double disc = 0.0;
    const bool adversarial = step >= model->config().warmup_steps;
    if (adversarial) {
      Tensor d_loss = DiscriminatorLoss(*discriminators, WaveTensor(crop->wave), g.fake);
      d_loss.Backward();
      d_adam.Step();
      disc = d_loss.value()(0, 0);
      ++summary.discriminator_updates;
    }
    summary.history.push_back(g.parts);
    summary.disc_history.push_back(disc);
    summary.steps = step + 1;
    AddParts(&window, g.parts, 1.0);
    window_disc += disc;
    ++window_count;
    if (on_log && config.log_every > 0 &&
        ((step + 1) % config.log_every == 0 || step + 1 == config.max_steps)) {
      Vec2WavProgress p;
      p.step = step + 1;
      p.seconds = elapsed();
      p.learning_rate = g_adam.lr();
      p.adversarial_active = adversarial;
      AddParts(&p.loss, window, 1.0 / window_count);
      p.disc_loss = window_disc / window_count;
      on_log(p);
      window = GeneratorLossBreakdown();
      window_disc = 0.0;
      window_count = 0;
    }
  }
  if (summary.skipped > 0) {
    LOG(INFO) << "vec2wav: skipped " << summary.skipped << " draws of too-short utterances";
  }
  summary.seconds = elapsed();
  return summary;
}

double MelDistance(const Vec2WavModel& model, const Vec2WavExample& ex, int prompt_frames) {
  CTXTTS_CHECK(prompt_frames >= 1 && prompt_frames < ex.num_frames(), errc::kInvalidArgument,
               "prompt must leave at least one target frame");
  const int hop = model.config().hop();
  const std::vector<int> tokens(ex.tokens.begin() + prompt_frames, ex.tokens.end());
  const std::vector<double> fake = model.Synthesize(tokens, ex.mel.topRows(prompt_frames));
  const std::vector<double> real(ex.wave.begin() + static_cast<long>(prompt_frames) * hop,
                                 ex.wave.end());
  const Matrix a = model.mel_extractor().Compute(fake).frames;
  const Matrix b = model.mel_extractor().Compute(real).frames;
  return (a - b).cwiseAbs().mean();
}

void SaveVec2Wav(const std::string& path, const Vec2WavModel& model) {
  json meta = {{"kind", "vec2wav"}, {"config", model.config()}};
  nn::SaveCheckpoint(path, meta, model);
}

std::unique_ptr<Vec2WavModel> LoadVec2Wav(const std::string& path) {
  const json meta = nn::ReadCheckpointMeta(path);
  CTXTTS_CHECK(meta.value("kind", std::string()) == "vec2wav", errc::kCheckpointMismatch,
               path + " is not a vec2wav checkpoint");
  Rng init(0);
  auto model = std::make_unique<Vec2WavModel>(meta.at("config").get<Vec2WavConfig>(), init);
  nn::LoadCheckpointParameters(path, model.get());
  return model;
}

}  // namespace ctxtts::vec2wav
