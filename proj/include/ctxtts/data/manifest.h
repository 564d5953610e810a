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

#ifndef CTXTTS_DATA_MANIFEST_H_
#define CTXTTS_DATA_MANIFEST_H_

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

namespace ctxtts::data {

struct UtteranceRecord {
  std::string utt_id;
  std::string audio_path;  // as written in the manifest
  std::vector<std::string> phonemes;
  std::vector<int> durations;  // frames per phoneme
  std::vector<int> tokens;
  // When non-empty the tokens were read from (and are written back as) this
  // file, one integer per line.
  std::string tokens_path;
  std::optional<std::string> speaker_id;

  int num_frames() const { return static_cast<int>(tokens.size()); }
  bool operator==(const UtteranceRecord&) const = default;
};

struct ManifestOptions {
  // Check that the audio exists and spans exactly |tokens| frames.
  bool check_audio = true;
  int hop = 160;
  int sample_rate = 16000;
  // Token values must lie in [0, num_tokens) when positive.
  int num_tokens = 0;
};

// Relative paths in a manifest are resolved against the manifest's
// directory.
std::string ResolvePath(const std::string& manifest_path, const std::string& path);

// Throws Error(kManifest) naming the offending line on the first invalid
// record.
std::vector<UtteranceRecord> LoadManifest(const std::string& path,
                                          const ManifestOptions& options = {});
void WriteManifest(const std::string& path,
                   const std::vector<UtteranceRecord>& records);

// Validates the alignment invariant sum(durations) == |tokens| and, if
// requested, the audio frame count. Throws Error(kManifest).
void ValidateRecord(const UtteranceRecord& record, const std::string& manifest_path,
                    const ManifestOptions& options);

std::vector<int> ReadTokenFile(const std::string& path);
void WriteTokenFile(const std::string& path, const std::vector<int>& tokens);

// Maps phoneme symbols to dense ids in first-seen order.
class PhonemeInventory {
 public:
  PhonemeInventory() = default;
  explicit PhonemeInventory(std::vector<std::string> symbols);
  static PhonemeInventory FromRecords(const std::vector<UtteranceRecord>& records);

  int size() const { return static_cast<int>(symbols_.size()); }
  // Throws Error(kUnknownPhoneme).
  int Id(const std::string& symbol) const;
  std::vector<int> Ids(const std::vector<std::string>& symbols) const;
  const std::string& Symbol(int id) const { return symbols_.at(id); }
  const std::vector<std::string>& symbols() const { return symbols_; }
  bool operator==(const PhonemeInventory& o) const { return symbols_ == o.symbols_; }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int> index_;
};

}  // namespace ctxtts::data

#endif  // CTXTTS_DATA_MANIFEST_H_
