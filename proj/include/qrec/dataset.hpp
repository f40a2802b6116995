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

#include "qrec/corpus.hpp"
#include "qrec/ratings.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace qrec {

// A corpus together with the ratings over its items.
struct Dataset {
  std::shared_ptr<const ItemCorpus> corpus;
  std::vector<std::string> user_ids;
  std::vector<Rating> ratings;

  std::size_t num_users() const { return user_ids.size(); }
  std::size_t num_items() const { return corpus ? corpus->num_items() : 0; }
  std::optional<std::size_t> find_user(std::string_view user_id) const;

  // Rating matrix over the full user/item index space.
  RatingMatrix matrix(std::span<const Rating> triples) const;

  // Hash of the corpus fingerprint, user ids and ratings.
  std::uint64_t fingerprint() const;
};

struct DatasetSummary {
  std::size_t users = 0;
  std::size_t items = 0;
  std::size_t entities = 0;
  std::size_t ratings = 0;
  double density = 0.0;  // ratings / (users * items)
};

DatasetSummary summarize(const Dataset& dataset);

struct DatasetFiles {
  std::filesystem::path items;
  std::filesystem::path entities;
  std::filesystem::path ratings;

  // items.tsv, entities.tsv, ratings.tsv inside `dir`.
  static DatasetFiles in(const std::filesystem::path& dir);
};

Dataset load_dataset(const DatasetFiles& files, double entity_threshold = kDefaultEntityThreshold,
                     const RatingsLoadOptions& options = {});

void write_dataset(const Dataset& dataset, const std::filesystem::path& dir);

}  // namespace qrec
