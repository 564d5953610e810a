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

#include "ctxtts/data/manifest.h"

#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "ctxtts/audio/wav.h"
#include "ctxtts/common/error.h"

namespace ctxtts::data {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<std::string> SplitWords(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

std::vector<int> ParseInts(const std::string& s) {
  std::vector<int> out;
  for (const std::string& w : SplitWords(s)) {
    size_t used = 0;
    int v = std::stoi(w, &used);
    if (used != w.size()) throw std::invalid_argument("not an integer: " + w);
    out.push_back(v);
  }
  return out;
}

bool LooksInline(const std::string& s) {
  return s.find_first_not_of("0123456789 \t-") == std::string::npos;
}

std::string JoinInts(const std::vector<int>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(v[i]);
  }
  return out;
}

std::vector<int> IntField(const json& j, const char* key) {
  const json& v = j.at(key);
  if (v.is_array()) return v.get<std::vector<int>>();
  return ParseInts(v.get<std::string>());
}

UtteranceRecord ParseRecord(const json& j, const std::string& manifest_path) {
  UtteranceRecord r;
  r.utt_id = j.at("utt_id").get<std::string>();
  r.audio_path = j.at("audio").get<std::string>();
  const json& ph = j.at("phonemes");
  r.phonemes = ph.is_array() ? ph.get<std::vector<std::string>>()
                             : SplitWords(ph.get<std::string>());
  r.durations = IntField(j, "durations");
  const json& tok = j.at("tokens");
  if (tok.is_string() && !LooksInline(tok.get<std::string>())) {
    r.tokens_path = tok.get<std::string>();
    r.tokens = ReadTokenFile(ResolvePath(manifest_path, r.tokens_path));
  } else {
    r.tokens = IntField(j, "tokens");
  }
  if (j.contains("speaker") && !j.at("speaker").is_null()) {
    r.speaker_id = j.at("speaker").get<std::string>();
  }
  return r;
}

}  // namespace

std::string ResolvePath(const std::string& manifest_path, const std::string& path) {
  fs::path p(path);
  if (p.is_absolute()) return path;
  return (fs::path(manifest_path).parent_path() / p).string();
}

std::vector<int> ReadTokenFile(const std::string& path) {
  std::ifstream in(path);
  CTXTTS_CHECK(in.good(), errc::kIo, "cannot open token file " + path);
  std::vector<int> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(std::stoi(line));
  }
  return out;
}

void WriteTokenFile(const std::string& path, const std::vector<int>& tokens) {
  std::ofstream out(path);
  CTXTTS_CHECK(out.good(), errc::kIo, "cannot write token file " + path);
  for (int t : tokens) out << t << '\n';
}

void ValidateRecord(const UtteranceRecord& r, const std::string& manifest_path,
                    const ManifestOptions& options) {
  CTXTTS_CHECK(!r.utt_id.empty(), errc::kManifest, "empty utt_id");
  CTXTTS_CHECK(!r.phonemes.empty(), errc::kManifest, r.utt_id + ": no phonemes");
  CTXTTS_CHECK(r.phonemes.size() == r.durations.size(), errc::kManifest,
               r.utt_id + ": " + std::to_string(r.phonemes.size()) + " phonemes but " +
                   std::to_string(r.durations.size()) + " durations");
  for (int d : r.durations) {
    CTXTTS_CHECK(d >= 0, errc::kManifest, r.utt_id + ": negative duration");
  }
  const long total = std::accumulate(r.durations.begin(), r.durations.end(), 0L);
  CTXTTS_CHECK(total == static_cast<long>(r.tokens.size()), errc::kManifest,
               r.utt_id + ": durations sum to " + std::to_string(total) + " but there are " +
                   std::to_string(r.tokens.size()) + " tokens");
  for (int t : r.tokens) {
    CTXTTS_CHECK(t >= 0 && (options.num_tokens <= 0 || t < options.num_tokens),
                 errc::kManifest, r.utt_id + ": token out of range: " + std::to_string(t));
  }
  if (options.check_audio) {
    audio::WavInfo info;
    try {
      info = audio::ReadWavInfo(ResolvePath(manifest_path, r.audio_path));
    } catch (const Error& e) {
      throw Error(errc::kManifest, r.utt_id + ": unreadable audio: " + e.what());
    }
    CTXTTS_CHECK(info.sample_rate == options.sample_rate, errc::kManifest,
                 r.utt_id + ": sample rate " + std::to_string(info.sample_rate));
    const long frames = (info.num_samples + options.hop - 1) / options.hop;
    CTXTTS_CHECK(frames == static_cast<long>(r.tokens.size()), errc::kManifest,
                 r.utt_id + ": audio has " + std::to_string(frames) + " frames but " +
                     std::to_string(r.tokens.size()) + " tokens");
  }
}

std::vector<UtteranceRecord> LoadManifest(const std::string& path,
                                          const ManifestOptions& options) {
  std::ifstream in(path);
  CTXTTS_CHECK(in.good(), errc::kIo, "cannot open manifest " + path);
  std::vector<UtteranceRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path + ":" + std::to_string(line_no) + ": ";
    try {
      UtteranceRecord r = ParseRecord(json::parse(line), path);
      ValidateRecord(r, path, options);
      records.push_back(std::move(r));
    } catch (const Error& e) {
      throw Error(errc::kManifest, where + e.what());
    } catch (const std::exception& e) {
      throw Error(errc::kManifest, where + e.what());
    }
  }
  return records;
}

void WriteManifest(const std::string& path, const std::vector<UtteranceRecord>& records) {
  std::ofstream out(path);
  CTXTTS_CHECK(out.good(), errc::kIo, "cannot write manifest " + path);
  for (const UtteranceRecord& r : records) {
    std::string phonemes;
    for (size_t i = 0; i < r.phonemes.size(); ++i) {
      if (i) phonemes += ' ';
      phonemes += r.phonemes[i];
    }
    json j = {{"utt_id", r.utt_id},
              {"audio", r.audio_path},
              {"phonemes", phonemes},
              {"durations", JoinInts(r.durations)},
              {"tokens", r.tokens_path.empty() ? JoinInts(r.tokens) : r.tokens_path}};
    j["speaker"] = r.speaker_id ? json(*r.speaker_id) : json(nullptr);
    out << j.dump() << '\n';
  }
}

PhonemeInventory::PhonemeInventory(std::vector<std::string> symbols)
    : symbols_(std::move(symbols)) {
  for (size_t i = 0; i < symbols_.size(); ++i) {
    CTXTTS_CHECK(index_.emplace(symbols_[i], static_cast<int>(i)).second,
                 errc::kInvalidArgument, "duplicate phoneme " + symbols_[i]);
  }
}

PhonemeInventory PhonemeInventory::FromRecords(const std::vector<UtteranceRecord>& records) {
  std::vector<std::string> symbols;
  std::unordered_map<std::string, int> seen;
  for (const UtteranceRecord& r : records) {
    for (const std::string& p : r.phonemes) {
      if (seen.emplace(p, 0).second) symbols.push_back(p);
    }
  }
  return PhonemeInventory(std::move(symbols));
}

int PhonemeInventory::Id(const std::string& symbol) const {
  auto it = index_.find(symbol);
  CTXTTS_CHECK(it != index_.end(), errc::kUnknownPhoneme, "unknown phoneme " + symbol);
  return it->second;
}

std::vector<int> PhonemeInventory::Ids(const std::vector<std::string>& symbols) const {
  std::vector<int> out;
  out.reserve(symbols.size());
  for (const std::string& s : symbols) out.push_back(Id(s));
  return out;
}

}  // namespace ctxtts::data
