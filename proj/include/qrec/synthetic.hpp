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

#include "qrec/dataset.hpp"

#include <cstdint>
#include <vector>

namespace qrec {

// Desk-scale benchmark with a planted low-rank preference structure. Users
// rate items they like; a share of the entities is tied to the same latent
// space, the rest are topic-free noise. Every item gets a distinct entity
// signature, so a truthful user can always be narrowed to one item.
struct SyntheticConfig {
  std::size_t users = 300;
  std::size_t items = 300;
  std::size_t entities = 360;
  int true_dim = 3;
  std::size_t min_ratings_per_user = 1;
  std::size_t max_ratings_per_user = 2;
  double taste_sharpness = 1.5;     // how strongly users pick liked items
  double topical_fraction = 0.6;    // entities tied to the latent space
  double popularity_skew = 0.0;     // log-normal spread of item popularity
  double rating_center = 3.0;       // rating at zero affinity
  double rating_slope = 1.2;        // rating change per unit affinity
  double min_entity_density = 0.03;
  double max_entity_density = 0.35;
  // Extra users whose ratings should never enter training.
  std::size_t held_out_users = 30;
  std::uint64_t seed = 7;
};

struct SyntheticDataset {
  Dataset dataset;
  std::vector<std::uint32_t> held_out_users;
};

SyntheticDataset generate_benchmark(const SyntheticConfig& config);

// 64 items whose first six entities ("bit 0" .. "bit 5") encode the item
// index bits. `with_redundant` appends entities that never split a subcube
// in half. Each of the `users` users rates one item, round-robin over a
// shuffled item order, with a value from a small planted model.
Dataset binary_code_dataset(std::size_t users = 64, bool with_redundant = false,
                            std::uint64_t seed = 11);

}  // namespace qrec
