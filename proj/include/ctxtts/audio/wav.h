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

#ifndef CTXTTS_AUDIO_WAV_H_
#define CTXTTS_AUDIO_WAV_H_

#include <span>
#include <string>
#include <vector>

namespace ctxtts::audio {

struct Waveform {
  std::vector<double> samples;  // mono, nominally in [-1, 1)
  int sample_rate = 16000;
};

struct WavInfo {
  int sample_rate = 0;
  int channels = 0;
  long num_samples = 0;  // per channel
};

// 16-bit PCM only. Multi-channel input is averaged down to mono.
Waveform ReadWav(const std::string& path);
WavInfo ReadWavInfo(const std::string& path);
// Writes 16-bit mono PCM, clipping to the representable range.
void WriteWav(const std::string& path, std::span<const double> samples,
              int sample_rate);
// The value a sample takes after a WriteWav/ReadWav round trip.
double QuantizePcm16(double s);

}  // namespace ctxtts::audio

#endif  // CTXTTS_AUDIO_WAV_H_
