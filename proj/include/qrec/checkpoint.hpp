// Copyright 2026 The Qrec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "qrec/factorization.hpp"

#include <filesystem>
#include <map>
#include <string>

namespace qrec {

// Versioned text checkpoint. Reals are stored as hex floats, so a
// save/load round trip is bit-exact.
struct Checkpoint {
  LatentModel model;
  HyperParams hp;
  std::uint64_t corpus_fingerprint = 0;
  // Free-form provenance (split seed, ratings fingerprint, ...).
  std::map<std::string, std::string> meta;
};

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& file);
Checkpoint load_checkpoint(const std::filesystem::path& file);

std::string serialize_checkpoint(const Checkpoint& checkpoint);
Checkpoint parse_checkpoint(const std::string& text);

}  // namespace qrec
