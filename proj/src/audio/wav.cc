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

#include "ctxtts/audio/wav.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "ctxtts/common/error.h"

namespace ctxtts::audio {

namespace {

struct Chunk {
  char id[4];
  uint32_t size;
};

struct Layout {
  WavInfo info;
  std::streamoff data_offset = 0;
  uint32_t data_bytes = 0;
};

Layout ParseHeader(std::ifstream& in, const std::string& path) {
  char riff[12];
  in.read(riff, 12);
  CTXTTS_CHECK(in && std::memcmp(riff, "RIFF", 4) == 0 &&
                   std::memcmp(riff + 8, "WAVE", 4) == 0,
               errc::kIo, "not a RIFF/WAVE file: " + path);
  Layout layout;
  bool have_fmt = false;
  Chunk chunk;
  while (in.read(reinterpret_cast<char*>(&chunk), sizeof(chunk))) {
    if (std::memcmp(chunk.id, "fmt ", 4) == 0) {
      uint16_t format = 0, channels = 0, block_align = 0, bits = 0;
      uint32_t rate = 0, byte_rate = 0;
      in.read(reinterpret_cast<char*>(&format), 2);
      in.read(reinterpret_cast<char*>(&channels), 2);
      in.read(reinterpret_cast<char*>(&rate), 4);
      in.read(reinterpret_cast<char*>(&byte_rate), 4);
      in.read(reinterpret_cast<char*>(&block_align), 2);
      in.read(reinterpret_cast<char*>(&bits), 2);
      CTXTTS_CHECK(format == 1 && bits == 16 && channels >= 1, errc::kIo,
                   "only 16-bit PCM WAV is supported: " + path);
      layout.info.sample_rate = static_cast<int>(rate);
      layout.info.channels = channels;
      in.seekg(static_cast<std::streamoff>(chunk.size) - 16 + (chunk.size & 1),
               std::ios::cur);
      have_fmt = true;
    } else if (std::memcmp(chunk.id, "data", 4) == 0) {
      CTXTTS_CHECK(have_fmt, errc::kIo, "data chunk before fmt chunk: " + path);
      layout.data_offset = in.tellg();
      layout.data_bytes = chunk.size;
      layout.info.num_samples =
          static_cast<long>(chunk.size / (2u * layout.info.channels));
      return layout;
    } else {
      in.seekg(static_cast<std::streamoff>(chunk.size + (chunk.size & 1)),
               std::ios::cur);
    }
  }
  throw Error(errc::kIo, "no data chunk in " + path);
}

}  // namespace

WavInfo ReadWavInfo(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  CTXTTS_CHECK(static_cast<bool>(in), errc::kIo, "cannot open " + path);
  return ParseHeader(in, path).info;
}

Waveform ReadWav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  CTXTTS_CHECK(static_cast<bool>(in), errc::kIo, "cannot open " + path);
  const Layout layout = ParseHeader(in, path);
  const int ch = layout.info.channels;
  std::vector<int16_t> raw(static_cast<size_t>(layout.info.num_samples) * ch);
  in.seekg(layout.data_offset);
  in.read(reinterpret_cast<char*>(raw.data()),
          static_cast<std::streamsize>(raw.size() * sizeof(int16_t)));
  CTXTTS_CHECK(static_cast<bool>(in), errc::kIo, "truncated audio: " + path);
  Waveform wav;
  wav.sample_rate = layout.info.sample_rate;
  wav.samples.resize(static_cast<size_t>(layout.info.num_samples));
  for (size_t i = 0; i < wav.samples.size(); ++i) {
    double acc = 0.0;
    for (int c = 0; c < ch; ++c) acc += raw[i * ch + c];
    wav.samples[i] = acc / (32768.0 * ch);
  }
  return wav;
}

void WriteWav(const std::string& path, std::span<const double> samples,
              int sample_rate) {
  std::ofstream out(path, std::ios::binary);
  CTXTTS_CHECK(static_cast<bool>(out), errc::kIo, "cannot write " + path);
  const uint32_t data_bytes = static_cast<uint32_t>(samples.size() * 2);
  const uint32_t riff_size = 36 + data_bytes;
  const uint16_t format = 1, channels = 1, bits = 16, block_align = 2;
  const uint32_t rate = static_cast<uint32_t>(sample_rate);
  const uint32_t byte_rate = rate * block_align;
  const uint32_t fmt_size = 16;
  out.write("RIFF", 4);
  out.write(reinterpret_cast<const char*>(&riff_size), 4);
  out.write("WAVEfmt ", 8);
  out.write(reinterpret_cast<const char*>(&fmt_size), 4);
  out.write(reinterpret_cast<const char*>(&format), 2);
  out.write(reinterpret_cast<const char*>(&channels), 2);
  out.write(reinterpret_cast<const char*>(&rate), 4);
  out.write(reinterpret_cast<const char*>(&byte_rate), 4);
  out.write(reinterpret_cast<const char*>(&block_align), 2);
  out.write(reinterpret_cast<const char*>(&bits), 2);
  out.write("data", 4);
  out.write(reinterpret_cast<const char*>(&data_bytes), 4);
  for (double s : samples) {
    const auto v = static_cast<int16_t>(
        std::clamp(std::round(s * 32768.0), -32768.0, 32767.0));
    out.write(reinterpret_cast<const char*>(&v), 2);
  }
  CTXTTS_CHECK(static_cast<bool>(out), errc::kIo, "write failed: " + path);
}

double QuantizePcm16(double s) {
  return std::clamp(std::round(s * 32768.0), -32768.0, 32767.0) / 32768.0;
}

}  // namespace ctxtts::audio
