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

#include "qrec/common.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace qrec {

class ItemCorpus;

struct Rating {
  std::uint32_t user = 0;
  std::uint32_t item = 0;
  double value = 0.0;

  bool operator==(const Rating&) const = default;
};

// Sparse observed ratings with per-user and per-item adjacency.
class RatingMatrix {
 public:
  RatingMatrix() = default;
  // Throws on out-of-range indices or duplicate (user, item) pairs.
  RatingMatrix(std::size_t num_users, std::size_t num_items, std::vector<Rating> triples);

  std::size_t num_users() const { return num_users_; }
  std::size_t num_items() const { return num_items_; }
  std::size_t size() const { return triples_.size(); }
  bool empty() const { return triples_.empty(); }

  std::span<const Rating> triples() const { return triples_; }
  // Positions into triples(), ascending.
  std::span<const std::uint32_t> user_entries(std::size_t user) const;
  std::span<const std::uint32_t> item_entries(std::size_t item) const;

  bool has_user(std::size_t user) const { return !user_entries(user).empty(); }

 private:
  std::size_t num_users_ = 0;
  std::size_t num_items_ = 0;
  std::vector<Rating> triples_;
  std::vector<std::uint32_t> by_user_offsets_, by_user_;
  std::vector<std::uint32_t> by_item_offsets_, by_item_;
};

struct RatingsLoadOptions {
  // Drop items (resp. users) with fewer transactions; applied once, items
  // first, then users.
  std::size_t min_item_transactions = 0;
  std::size_t min_user_transactions = 0;
};

struct LoadedRatings {
  std::vector<std::string> user_ids;  // dense index -> external id
  std::vector<Rating> triples;
};

// Tab-separated user_id, item_id, rating. Item ids must exist in the corpus.
// Errors: malformed rows and duplicate (user, item) pairs name the line; an
// empty file is an error.
LoadedRatings load_ratings(const std::filesystem::path& file, const ItemCorpus& corpus,
                           const RatingsLoadOptions& options = {});

void write_ratings(const std::filesystem::path& file, std::span<const std::string> user_ids,
                   const ItemCorpus& corpus, std::span<const Rating> triples);

}  // namespace qrec
