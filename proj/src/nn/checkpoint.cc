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

#include "ctxtts/nn/checkpoint.h"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "ctxtts/common/error.h"

namespace ctxtts::nn {

namespace {

constexpr char kMagic[8] = {'C', 'T', 'X', 'T', 'T', 'S', 'C', 'K'};
constexpr uint32_t kVersion = 1;

nlohmann::json ReadHeader(std::ifstream& in, const std::string& path) {
  char magic[8];
  uint32_t version = 0;
  uint64_t meta_len = 0;
  in.read(magic, sizeof(magic));
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  in.read(reinterpret_cast<char*>(&meta_len), sizeof(meta_len));
  CTXTTS_CHECK(in && std::memcmp(magic, kMagic, sizeof(kMagic)) == 0,
               errc::kIo, "not a checkpoint: " + path);
  CTXTTS_CHECK(version == kVersion, errc::kCheckpointMismatch,
               "unsupported checkpoint version in " + path);
  std::string text(meta_len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(meta_len));
  CTXTTS_CHECK(static_cast<bool>(in), errc::kIo, "truncated checkpoint: " + path);
  return nlohmann::json::parse(text);
}

}  // namespace

void SaveCheckpoint(const std::string& path, const nlohmann::json& meta,
                    const Module& module) {
  nlohmann::json full = meta;
  nlohmann::json index = nlohmann::json::array();
  const auto params = module.NamedParameters();
  for (const auto& [name, t] : params) {
    index.push_back({{"name", name}, {"rows", t.rows()}, {"cols", t.cols()}});
  }
  full["tensors"] = index;
  const std::string text = full.dump();

  std::ofstream out(path, std::ios::binary);
  CTXTTS_CHECK(static_cast<bool>(out), errc::kIo, "cannot write " + path);
  const uint64_t meta_len = text.size();
  out.write(kMagic, sizeof(kMagic));
  out.write(reinterpret_cast<const char*>(&kVersion), sizeof(kVersion));
  out.write(reinterpret_cast<const char*>(&meta_len), sizeof(meta_len));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto& [name, t] : params) {
    out.write(reinterpret_cast<const char*>(t.value().data()),
              static_cast<std::streamsize>(t.value().size() * sizeof(double)));
  }
  CTXTTS_CHECK(static_cast<bool>(out), errc::kIo, "write failed: " + path);
}

nlohmann::json ReadCheckpointMeta(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  CTXTTS_CHECK(static_cast<bool>(in), errc::kIo, "cannot open " + path);
  return ReadHeader(in, path);
}

void LoadCheckpointParameters(const std::string& path, Module* module) {
  std::ifstream in(path, std::ios::binary);
  CTXTTS_CHECK(static_cast<bool>(in), errc::kIo, "cannot open " + path);
  const nlohmann::json meta = ReadHeader(in, path);
  auto params = module->NamedParameters();
  const auto& index = meta.at("tensors");
  CTXTTS_CHECK(index.size() == params.size(), errc::kCheckpointMismatch,
               "parameter count differs from the model in " + path);
  for (size_t i = 0; i < params.size(); ++i) {
    auto& [name, t] = params[i];
    CTXTTS_CHECK(index[i].at("name").get<std::string>() == name &&
                     index[i].at("rows").get<Eigen::Index>() == t.rows() &&
                     index[i].at("cols").get<Eigen::Index>() == t.cols(),
                 errc::kCheckpointMismatch,
                 "parameter layout differs at " + name + " in " + path);
    in.read(reinterpret_cast<char*>(t.mutable_value().data()),
            static_cast<std::streamsize>(t.value().size() * sizeof(double)));
  }
  CTXTTS_CHECK(static_cast<bool>(in), errc::kIo, "truncated checkpoint: " + path);
}

}  // namespace ctxtts::nn
