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

#include "ctxtts/txt2vec/trainer.h"

#include <chrono>
#include <cmath>
#include <numeric>

#include "ctxtts/common/error.h"
#include "ctxtts/nn/checkpoint.h"
#include "ctxtts/nn/optim.h"

namespace ctxtts::txt2vec {

using nlohmann::json;

namespace {

double LearningRate(const Txt2VecTrainConfig& c, int step) {
  if (step < c.warmup_steps) return c.learning_rate * (step + 1) / c.warmup_steps;
  const double span = std::max(1, c.max_steps - c.warmup_steps);
  const double progress = std::min(1.0, (step - c.warmup_steps) / span);
  return c.min_learning_rate +
         0.5 * (c.learning_rate - c.min_learning_rate) * (1.0 + std::cos(M_PI * progress));
}

}  // namespace

TrainSummary TrainTxt2Vec(Txt2VecModel* model, const diffusion::TransitionSchedule& sched,
                          const std::vector<TrainingExample>& examples,
                          const Txt2VecTrainConfig& config, Rng& rng,
                          const std::function<void(const TrainProgress&)>& on_log) {
  CTXTTS_CHECK(!examples.empty(), errc::kInvalidArgument, "no training examples");
  CTXTTS_CHECK(config.batch_size >= 1 && config.max_steps >= 0, errc::kInvalidConfig,
               "invalid txt2vec training config");
  nn::AdamOptions opt;
  opt.lr = config.learning_rate;
  opt.weight_decay = config.weight_decay;
  opt.clip_norm = config.clip_norm;
  nn::Adam adam(model->Parameters(), opt);

  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  TrainSummary summary;
  LossBreakdown window;
  int window_count = 0;
  for (int step = 0; step < config.max_steps; ++step) {
    if (config.time_limit_seconds > 0.0 && elapsed() >= config.time_limit_seconds) break;
    adam.set_lr(LearningRate(config, step));
    LossBreakdown avg;
    for (int b = 0; b < config.batch_size; ++b) {
      const auto& ex = examples[rng.UniformInt(0, static_cast<int64_t>(examples.size()) - 1)];
      LossBreakdown part;
      nn::Tensor loss = SampleTrainingLoss(*model, sched, ex, rng, &part);
      nn::Scale(loss, 1.0 / config.batch_size).Backward();
      avg.total += part.total / config.batch_size;
      avg.duration += part.duration / config.batch_size;
      avg.diffusion += part.diffusion / config.batch_size;
      avg.aux += part.aux / config.batch_size;
      avg.accuracy += part.accuracy / config.batch_size;
    }
    const double norm = adam.Step();
    summary.loss_history.push_back(avg.total);
    summary.steps = step + 1;
    window.total += avg.total;
    window.duration += avg.duration;
    window.diffusion += avg.diffusion;
    window.aux += avg.aux;
    window.accuracy += avg.accuracy;
    ++window_count;
    if (on_log && config.log_every > 0 &&
        ((step + 1) % config.log_every == 0 || step + 1 == config.max_steps)) {
      TrainProgress p;
      p.step = step + 1;
      p.learning_rate = adam.lr();
      p.grad_norm = norm;
      p.seconds = elapsed();
      p.loss.total = window.total / window_count;
      p.loss.duration = window.duration / window_count;
      p.loss.diffusion = window.diffusion / window_count;
      p.loss.aux = window.aux / window_count;
      p.loss.accuracy = window.accuracy / window_count;
      on_log(p);
      window = LossBreakdown();
      window_count = 0;
    }
  }
  summary.seconds = elapsed();
  return summary;
}

ContinuationScore ScoreContinuation(const Txt2VecModel& model,
                                    const diffusion::TransitionSchedule& sched,
                                    const TrainingExample& ex, int prompt_frames, Rng& rng,
                                    const InferenceOptions& options) {
  const int n = static_cast<int>(ex.phonemes.size());
  CTXTTS_CHECK(n >= 2, errc::kInvalidArgument, "need at least two phonemes to continue");
  int best = 1, best_gap = std::numeric_limits<int>::max(), acc = 0;
  for (int i = 1; i < n; ++i) {
    acc += ex.durations[i - 1];
    if (std::abs(acc - prompt_frames) < best_gap) {
      best_gap = std::abs(acc - prompt_frames);
      best = i;
    }
  }
  std::vector<int> pa(ex.phonemes.begin(), ex.phonemes.begin() + best);
  std::vector<int> pd(ex.phonemes.begin() + best, ex.phonemes.end());
  std::vector<int> da(ex.durations.begin(), ex.durations.begin() + best);
  const int a_len = std::accumulate(da.begin(), da.end(), 0);
  diffusion::TokenSequence ca(ex.tokens.begin(), ex.tokens.begin() + a_len);
  EditResult r = InferContinue(model, sched, pa, pd, da, ca, rng, options);

  ContinuationScore score;
  score.prompt_frames = a_len;
  score.expected = ex.num_frames() - a_len;
  score.generated = r.x_len;
  for (int i = 0; i < std::min(score.expected, score.generated); ++i) {
    score.matched += r.tokens[a_len + i] == ex.tokens[a_len + i];
  }
  return score;
}

void SaveTxt2Vec(const std::string& path, const Txt2VecModel& model,
                 const diffusion::TransitionSchedule& sched,
                 const data::PhonemeInventory& inventory) {
  CTXTTS_CHECK(sched.SameAs(model.config().MakeSchedule()), errc::kCheckpointMismatch,
               "schedule does not match the model config");
  json meta = {{"kind", "txt2vec"},
               {"config", model.config()},
               {"schedule", sched.Serialize()},
               {"phonemes", inventory.symbols()},
               {"num_tokens", model.config().num_tokens}};
  nn::SaveCheckpoint(path, meta, model);
}

LoadedTxt2Vec LoadTxt2Vec(const std::string& path,
                          const diffusion::TransitionSchedule* expected) {
  const json meta = nn::ReadCheckpointMeta(path);
  CTXTTS_CHECK(meta.value("kind", std::string()) == "txt2vec", errc::kCheckpointMismatch,
               path + " is not a txt2vec checkpoint");
  const Txt2VecConfig config = meta.at("config").get<Txt2VecConfig>();
  auto stored = std::make_unique<diffusion::TransitionSchedule>(
      diffusion::TransitionSchedule::Parse(meta.at("schedule").get<std::string>()));
  CTXTTS_CHECK(stored->SameAs(config.MakeSchedule()), errc::kCheckpointMismatch,
               "stored schedule disagrees with the stored config");
  if (expected) {
    CTXTTS_CHECK(stored->SameAs(*expected), errc::kCheckpointMismatch,
                 "checkpoint schedule differs from the requested schedule");
  }
  LoadedTxt2Vec out;
  Rng init(0);
  out.model = std::make_unique<Txt2VecModel>(config, init);
  nn::LoadCheckpointParameters(path, out.model.get());
  out.schedule = std::move(stored);
  out.inventory = data::PhonemeInventory(meta.at("phonemes").get<std::vector<std::string>>());
  CTXTTS_CHECK(out.inventory.size() == config.num_phonemes, errc::kCheckpointMismatch,
               "phoneme inventory size differs from the config");
  return out;
}

}  // namespace ctxtts::txt2vec
