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

#include "ctxtts/audio/features.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ctxtts/common/error.h"
#include "ctxtts/nn/ops.h"

namespace ctxtts::audio {

namespace {

// Slaney-style mel scale: linear below 1 kHz, logarithmic above.
double HzToMel(double hz) {
  constexpr double kStep = 200.0 / 3.0;
  constexpr double kBreakHz = 1000.0;
  const double break_mel = kBreakHz / kStep;
  const double log_step = std::log(6.4) / 27.0;
  return hz < kBreakHz ? hz / kStep
                       : break_mel + std::log(hz / kBreakHz) / log_step;
}

double MelToHz(double mel) {
  constexpr double kStep = 200.0 / 3.0;
  constexpr double kBreakHz = 1000.0;
  const double break_mel = kBreakHz / kStep;
  const double log_step = std::log(6.4) / 27.0;
  return mel < break_mel ? mel * kStep
                         : kBreakHz * std::exp(log_step * (mel - break_mel));
}

void CheckSignal(std::span<const double> samples) {
  CTXTTS_CHECK(!samples.empty(), errc::kInvalidArgument, "empty audio");
  for (double s : samples) {
    CTXTTS_CHECK(std::isfinite(s), errc::kInvalidArgument, "non-finite audio sample");
  }
}

}  // namespace

void FeatureConfig::Validate() const {
  CTXTTS_CHECK(sample_rate > 0 && hop > 0 && win > 0 && n_fft >= win &&
                   num_mels > 0 && fmax > fmin && fmax <= sample_rate / 2.0 &&
                   min_f0 > 0 && max_f0 > min_f0 && pitch_window > 0,
               errc::kInvalidConfig, "inconsistent feature configuration");
}

void to_json(nlohmann::json& j, const FeatureConfig& c) {
  j = {{"sample_rate", c.sample_rate}, {"hop", c.hop},
       {"win", c.win},                 {"n_fft", c.n_fft},
       {"num_mels", c.num_mels},       {"fmin", c.fmin},
       {"fmax", c.fmax},               {"log_floor", c.log_floor},
       {"min_f0", c.min_f0},           {"max_f0", c.max_f0},
       {"pitch_window", c.pitch_window}};
}

void from_json(const nlohmann::json& j, FeatureConfig& c) {
  FeatureConfig d;
  c.sample_rate = j.value("sample_rate", d.sample_rate);
  c.hop = j.value("hop", d.hop);
  c.win = j.value("win", d.win);
  c.n_fft = j.value("n_fft", d.n_fft);
  c.num_mels = j.value("num_mels", d.num_mels);
  c.fmin = j.value("fmin", d.fmin);
  c.fmax = j.value("fmax", d.fmax);
  c.log_floor = j.value("log_floor", d.log_floor);
  c.min_f0 = j.value("min_f0", d.min_f0);
  c.max_f0 = j.value("max_f0", d.max_f0);
  c.pitch_window = j.value("pitch_window", d.pitch_window);
}

long ReflectIndex(long i, long n) {
  if (n == 1) return 0;
  const long period = 2 * (n - 1);
  long m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - m;
}

MelExtractor::MelExtractor(FeatureConfig config) : config_(config) {
  config_.Validate();
  const int bins = config_.n_fft / 2 + 1;
  dft_cos_.resize(config_.win, bins);
  dft_sin_.resize(config_.win, bins);
  for (int n = 0; n < config_.win; ++n) {
    // Periodic Hann window.
    const double w = 0.5 - 0.5 * std::cos(2.0 * M_PI * n / config_.win);
    for (int k = 0; k < bins; ++k) {
      const double angle = 2.0 * M_PI * k * n / config_.n_fft;
      dft_cos_(n, k) = w * std::cos(angle);
      dft_sin_(n, k) = -w * std::sin(angle);
    }
  }

  mel_basis_ = nn::Matrix::Zero(bins, config_.num_mels);
  const double mel_lo = HzToMel(config_.fmin);
  const double mel_hi = HzToMel(config_.fmax);
  std::vector<double> edges(config_.num_mels + 2);
  for (size_t i = 0; i < edges.size(); ++i) {
    edges[i] = MelToHz(mel_lo + (mel_hi - mel_lo) * i / (config_.num_mels + 1));
  }
  for (int m = 0; m < config_.num_mels; ++m) {
    const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
    const double norm = 2.0 / (hi - lo);
    for (int k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * config_.sample_rate / config_.n_fft;
      const double rise = (f - lo) / (mid - lo);
      const double fall = (hi - f) / (hi - mid);
      mel_basis_(k, m) = norm * std::max(0.0, std::min(rise, fall));
    }
  }
}

std::vector<int> MelExtractor::FrameIndex(long samples) const {
  const int frames = config_.NumFrames(samples);
  std::vector<int> index(static_cast<size_t>(frames) * config_.win);
  for (int j = 0; j < frames; ++j) {
    const long start = static_cast<long>(j) * config_.hop + config_.hop / 2 -
                       config_.win / 2;
    for (int n = 0; n < config_.win; ++n) {
      index[static_cast<size_t>(j) * config_.win + n] =
          static_cast<int>(ReflectIndex(start + n, samples));
    }
  }
  return index;
}

MelSpectrogram MelExtractor::Compute(std::span<const double> samples) const {
  CheckSignal(samples);
  const long n = static_cast<long>(samples.size());
  const int frames = config_.NumFrames(n);
  const std::vector<int> index = FrameIndex(n);
  nn::Matrix framed(frames, config_.win);
  for (size_t i = 0; i < index.size(); ++i) framed.data()[i] = samples[index[i]];
  const nn::Matrix re = framed * dft_cos_;
  const nn::Matrix im = framed * dft_sin_;
  const nn::Matrix mag = (re.array().square() + im.array().square()).sqrt();
  MelSpectrogram mel;
  mel.hop = config_.hop;
  mel.sample_rate = config_.sample_rate;
  mel.frames = ((mag * mel_basis_).array() + config_.log_floor).log();
  return mel;
}

nn::Tensor MelExtractor::ComputeDifferentiable(const nn::Tensor& waveform) const {
  CTXTTS_CHECK(waveform.cols() == 1 && waveform.rows() > 0, errc::kInvalidArgument,
               "waveform tensor must be [samples x 1]");
  const long n = waveform.rows();
  const int frames = config_.NumFrames(n);
  nn::Tensor framed = nn::GatherFlat(waveform, FrameIndex(n), frames, config_.win);
  nn::Tensor re = nn::MatMul(framed, nn::Tensor(dft_cos_));
  nn::Tensor im = nn::MatMul(framed, nn::Tensor(dft_sin_));
  nn::Tensor mag = nn::Sqrt(nn::AddScalar(nn::Add(nn::Square(re), nn::Square(im)), 1e-12));
  return nn::Log(nn::AddScalar(nn::MatMul(mag, nn::Tensor(mel_basis_)), config_.log_floor));
}

AutocorrelationAuxExtractor::AutocorrelationAuxExtractor(FeatureConfig config)
    : config_(config) {
  config_.Validate();
}

AuxiliaryFeatures AutocorrelationAuxExtractor::Extract(
    std::span<const double> samples) const {
  CheckSignal(samples);
  const long n = static_cast<long>(samples.size());
  const int frames = config_.NumFrames(n);
  const int lag_min = std::max(2, static_cast<int>(std::floor(config_.sample_rate / config_.max_f0)));
  const int lag_max = static_cast<int>(std::ceil(config_.sample_rate / config_.min_f0));
  const int num_lags = lag_max - lag_min + 1;
  const int w = config_.pitch_window;
  constexpr double kBallast = 1e-12;
  constexpr double kLagPenalty = 0.05;
  constexpr double kTransitionWeight = 0.1;

  auto at = [&](long i) { return (i < 0 || i >= n) ? 0.0 : samples[i]; };

  AuxiliaryFeatures aux;
  aux.values.resize(frames, 3);
  nn::Matrix nccf(frames, num_lags);
  for (int j = 0; j < frames; ++j) {
    const long centre = static_cast<long>(j) * config_.hop + config_.hop / 2;
    double energy = 0.0;
    const long e0 = centre - config_.win / 2;
    for (int i = 0; i < config_.win; ++i) {
      const double s = samples[ReflectIndex(e0 + i, n)];
      energy += s * s;
    }
    aux.values(j, 1) = std::log(energy + 1e-10);

    for (int li = 0; li < num_lags; ++li) {
      const int lag = lag_min + li;
      const long s0 = centre - (w + lag) / 2;
      double cross = 0.0, ea = 0.0, eb = 0.0;
      for (int i = 0; i < w; ++i) {
        const double a = at(s0 + i);
        const double b = at(s0 + i + lag);
        cross += a * b;
        ea += a * a;
        eb += b * b;
      }
      nccf(j, li) = cross / std::sqrt(ea * eb + kBallast);
    }
  }

  // Viterbi over lags. Local cost prefers strong correlation and, weakly,
  // shorter lags (guards against octave-down errors); transitions penalize
  // log-lag jumps.
  std::vector<double> log_lag(num_lags);
  for (int li = 0; li < num_lags; ++li) log_lag[li] = std::log(lag_min + li);
  std::vector<double> cost(num_lags), next(num_lags);
  std::vector<std::vector<int>> back(frames, std::vector<int>(num_lags, 0));
  auto local = [&](int j, int li) {
    return 1.0 - nccf(j, li) + kLagPenalty * (lag_min + li) / lag_max;
  };
  for (int li = 0; li < num_lags; ++li) cost[li] = local(0, li);
  for (int j = 1; j < frames; ++j) {
    for (int li = 0; li < num_lags; ++li) {
      double best = std::numeric_limits<double>::infinity();
      int arg = 0;
      for (int pi = 0; pi < num_lags; ++pi) {
        const double c = cost[pi] + kTransitionWeight * std::abs(log_lag[li] - log_lag[pi]);
        if (c < best) {
          best = c;
          arg = pi;
        }
      }
      next[li] = best + local(j, li);
      back[j][li] = arg;
    }
    std::swap(cost, next);
  }
  int state = static_cast<int>(std::min_element(cost.begin(), cost.end()) - cost.begin());
  for (int j = frames - 1; j >= 0; --j) {
    double lag = lag_min + state;
    if (state > 0 && state + 1 < num_lags) {
      const double l = nccf(j, state - 1), c = nccf(j, state), r = nccf(j, state + 1);
      const double denom = l - 2.0 * c + r;
      if (denom < 0.0) lag += std::clamp(0.5 * (l - r) / denom, -0.5, 0.5);
    }
    aux.values(j, 0) = config_.sample_rate / lag;
    aux.values(j, 2) = std::clamp(nccf(j, state), 0.0, 1.0);
    if (j > 0) state = back[j][state];
  }
  return aux;
}

}  // namespace ctxtts::audio
