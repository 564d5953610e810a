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

#ifndef CTXTTS_NN_CHECKPOINT_H_
#define CTXTTS_NN_CHECKPOINT_H_

#include <string>

#include "json.hpp"

#include "ctxtts/nn/layers.h"

namespace ctxtts::nn {

// Binary checkpoint: a JSON metadata block (configs, schedules, vocabularies)
// followed by every named parameter as little-endian doubles.
void SaveCheckpoint(const std::string& path, const nlohmann::json& meta,
                    const Module& module);

// Reads only the metadata block, so callers can build the module first.
nlohmann::json ReadCheckpointMeta(const std::string& path);

// Fills the module's parameters; names and shapes must match exactly.
void LoadCheckpointParameters(const std::string& path, Module* module);

}  // namespace ctxtts::nn

#endif  // CTXTTS_NN_CHECKPOINT_H_
