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

#ifndef CTXTTS_COMMON_ERROR_H_
#define CTXTTS_COMMON_ERROR_H_

#include <stdexcept>
#include <string>

namespace ctxtts {

// Every failure raised by the library carries a short machine-readable code
// next to the human message. The CLI prints both on a single line.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

namespace errc {
inline constexpr const char* kInvalidArgument = "invalid_argument";
inline constexpr const char* kLengthMismatch = "length_mismatch";
inline constexpr const char* kDegeneratePosterior = "degenerate_posterior";
inline constexpr const char* kInvalidSchedule = "invalid_schedule";
inline constexpr const char* kManifest = "manifest_error";
inline constexpr const char* kIo = "io_error";
inline constexpr const char* kCheckpointMismatch = "checkpoint_mismatch";
inline constexpr const char* kInvalidConfig = "invalid_config";
inline constexpr const char* kUntrained = "untrained_tokenizer";
inline constexpr const char* kUnknownPhoneme = "unknown_phoneme";
inline constexpr const char* kEmbedder = "embedder_error";
}  // namespace errc

#define CTXTTS_CHECK(cond, code, msg)                \
  do {                                               \
    if (!(cond)) throw ::ctxtts::Error((code), (msg)); \
  } while (0)

}  // namespace ctxtts

#endif  // CTXTTS_COMMON_ERROR_H_
