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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace qrec {

inline constexpr double kDefaultEntityThreshold = 0.1;

struct ItemRecord {
  std::string item_id;
  std::size_t index = 0;
  std::string title;
  std::string document;  // description and reviews, concatenated
};

struct ScoredEntity {
  std::string entity;
  double score = 0.0;

  bool operator==(const ScoredEntity&) const = default;
};

// Items, the entity vocabulary and the binary item x entity incidence.
// Immutable once built, so it can be shared by any number of sessions.
class ItemCorpus {
 public:
  // item_entities[d] lists the (already thresholded) entities of item d.
  // Entity strings are case-folded; the vocabulary is ordered by first
  // appearance when walking items in index order.
  ItemCorpus(std::vector<ItemRecord> items,
             const std::vector<std::vector<std::string>>& item_entities);
  // Same, but the vocabulary starts with `vocabulary` in the given order.
  ItemCorpus(std::vector<ItemRecord> items,
             const std::vector<std::vector<std::string>>& item_entities,
             const std::vector<std::string>& vocabulary);

  std::size_t num_items() const { return items_.size(); }
  std::size_t num_entities() const { return vocab_.size(); }

  const ItemRecord& item(std::size_t index) const;
  std::optional<std::size_t> find_item(std::string_view item_id) const;

  const std::string& entity(std::size_t index) const;
  std::optional<std::size_t> find_entity(std::string_view entity) const;

  bool contains(std::size_t item, std::size_t entity) const {
    return (columns_[entity][item >> 6] >> (item & 63)) & 1U;
  }

  // Sorted entity indices present in an item.
  std::span<const std::uint32_t> entities_of(std::size_t item) const;

  // One-hot encoding of an entity over items.
  std::vector<std::uint8_t> entity_column(std::size_t entity) const;

  std::size_t incidence_nnz() const { return nnz_; }

  // Stable hash of ids, titles, vocabulary and incidence.
  std::uint64_t fingerprint() const { return fingerprint_; }

 private:
  std::vector<ItemRecord> items_;
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, std::size_t> item_lookup_;
  std::unordered_map<std::string, std::size_t> entity_lookup_;
  std::vector<std::vector<std::uint32_t>> rows_;
  std::vector<std::vector<std::uint64_t>> columns_;  // bitset per entity
  std::size_t nnz_ = 0;
  std::uint64_t fingerprint_ = 0;
};

// Lower-case ASCII letters and trim surrounding whitespace.
std::string fold_entity(std::string_view entity);

// Reads the tab-separated items file (item_id, title, document) and entities
// file (item_id, entity, score). Entities scoring below `threshold` are
// dropped. Unknown item ids and an empty corpus are hard errors.
ItemCorpus ingest_corpus(const std::filesystem::path& items_file,
                         const std::filesystem::path& entities_file,
                         double threshold = kDefaultEntityThreshold);

// Writes a corpus back out in the ingest format. All entities are written
// with score 1.
void write_corpus(const ItemCorpus& corpus, const std::filesystem::path& items_file,
                  const std::filesystem::path& entities_file);

// Frequency-based stand-in for an entity linker. Candidate phrases are runs
// of 1-3 consecutive non-stop-word tokens; a phrase scores
// count(phrase) / max count over all candidate phrases in the document.
// Results are sorted by score descending, then phrase ascending.
std::vector<ScoredEntity> heuristic_entities(std::string_view document,
                                             double threshold = kDefaultEntityThreshold);

bool is_stop_word(std::string_view token);

// "Are you seeking for a [{entity}] related item?"
std::string render_question(std::string_view entity);

// Entities not yet asked in one session.
class QuestionPool {
 public:
  explicit QuestionPool(std::size_t num_entities);

  bool empty() const { return remaining_ == 0; }
  std::size_t size() const { return remaining_; }
  std::size_t capacity() const { return available_.size(); }
  bool contains(std::size_t entity) const {
    return entity < available_.size() && available_[entity];
  }

  // Removes an entity; asking the same entity twice is an error.
  void take(std::size_t entity);

  // Available entity indices in ascending order.
  std::vector<std::size_t> available() const;

 private:
  std::vector<bool> available_;
  std::size_t remaining_ = 0;
};

}  // namespace qrec
