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

#include "qrec/corpus.hpp"

#include "tsv.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <unordered_set>

namespace qrec {

ItemCorpus::ItemCorpus(std::vector<ItemRecord> items,
                       const std::vector<std::vector<std::string>>& item_entities)
    : ItemCorpus(std::move(items), item_entities, {}) {}

ItemCorpus::ItemCorpus(std::vector<ItemRecord> items,
                       const std::vector<std::vector<std::string>>& item_entities,
                       const std::vector<std::string>& vocabulary)
    : items_(std::move(items)) {
  if (items_.empty()) throw Error(ErrorCode::invalid_argument, "corpus has no items");
  if (item_entities.size() != items_.size()) {
    throw Error(ErrorCode::invalid_argument, "entity lists do not match item count");
  }
  for (std::size_t d = 0; d < items_.size(); ++d) {
    items_[d].index = d;
    if (!item_lookup_.emplace(items_[d].item_id, d).second) {
      throw Error(ErrorCode::invalid_argument, "duplicate item id '" + items_[d].item_id + "'");
    }
  }

  for (const auto& raw : vocabulary) {
    std::string folded = fold_entity(raw);
    if (!folded.empty() && entity_lookup_.emplace(folded, vocab_.size()).second) {
      vocab_.push_back(folded);
    }
  }
  rows_.resize(items_.size());
  for (std::size_t d = 0; d < items_.size(); ++d) {
    for (const auto& raw : item_entities[d]) {
      std::string folded = fold_entity(raw);
      if (folded.empty()) continue;
      auto [it, inserted] = entity_lookup_.emplace(folded, vocab_.size());
      if (inserted) vocab_.push_back(folded);
      rows_[d].push_back(static_cast<std::uint32_t>(it->second));
    }
    auto& row = rows_[d];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    nnz_ += row.size();
  }

  const std::size_t words = (items_.size() + 63) / 64;
  columns_.assign(vocab_.size(), std::vector<std::uint64_t>(words, 0));
  for (std::size_t d = 0; d < items_.size(); ++d) {
    for (auto e : rows_[d]) columns_[e][d >> 6] |= std::uint64_t{1} << (d & 63);
  }

  Fingerprint fp;
  fp.add_pod(items_.size());
  for (const auto& item : items_) {
    fp.add(item.item_id);
    fp.add(item.title);
  }
  fp.add_pod(vocab_.size());
  for (const auto& e : vocab_) fp.add(e);
  for (const auto& row : rows_) {
    fp.add_pod(row.size());
    if (!row.empty()) fp.add(row.data(), row.size() * sizeof(std::uint32_t));
  }
  fingerprint_ = fp.value();
}

const ItemRecord& ItemCorpus::item(std::size_t index) const {
  if (index >= items_.size()) {
    throw Error(ErrorCode::invalid_argument, "item index " + std::to_string(index) + " out of range");
  }
  return items_[index];
}

std::optional<std::size_t> ItemCorpus::find_item(std::string_view item_id) const {
  auto it = item_lookup_.find(std::string(item_id));
  if (it == item_lookup_.end()) return std::nullopt;
  return it->second;
}

const std::string& ItemCorpus::entity(std::size_t index) const {
  if (index >= vocab_.size()) {
    throw Error(ErrorCode::invalid_argument,
                "entity index " + std::to_string(index) + " out of range");
  }
  return vocab_[index];
}

std::optional<std::size_t> ItemCorpus::find_entity(std::string_view entity) const {
  auto it = entity_lookup_.find(fold_entity(entity));
  if (it == entity_lookup_.end()) return std::nullopt;
  return it->second;
}

std::span<const std::uint32_t> ItemCorpus::entities_of(std::size_t item) const {
  if (item >= rows_.size()) {
    throw Error(ErrorCode::invalid_argument, "item index " + std::to_string(item) + " out of range");
  }
  return rows_[item];
}

std::vector<std::uint8_t> ItemCorpus::entity_column(std::size_t entity) const {
  if (entity >= vocab_.size()) {
    throw Error(ErrorCode::invalid_argument,
                "entity index " + std::to_string(entity) + " out of range");
  }
  std::vector<std::uint8_t> out(items_.size());
  for (std::size_t d = 0; d < items_.size(); ++d) out[d] = contains(d, entity) ? 1 : 0;
  return out;
}

std::string fold_entity(std::string_view entity) {
  auto first = entity.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  auto last = entity.find_last_not_of(" \t\r\n");
  std::string out(entity.substr(first, last - first + 1));
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

ItemCorpus ingest_corpus(const std::filesystem::path& items_file,
                         const std::filesystem::path& entities_file, double threshold) {
  std::vector<ItemRecord> items;
  std::unordered_map<std::string, std::size_t> index;
  {
    auto in = tsv::open_input(items_file);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty() || line == "\r") continue;
      auto cols = tsv::split(line);
      if (lineno == 1 && tsv::is_header(cols, "item_id")) continue;
      if (cols.size() < 2 || cols[0].empty()) {
        tsv::fail(ErrorCode::parse, items_file, lineno, "expected item_id<TAB>title<TAB>document");
      }
      ItemRecord rec;
      rec.item_id = std::string(cols[0]);
      rec.title = tsv::unescape(cols[1]);
      for (std::size_t c = 2; c < cols.size(); ++c) {
        if (c > 2) rec.document.push_back('\t');
        rec.document += tsv::unescape(cols[c]);
      }
      rec.index = items.size();
      if (!index.emplace(rec.item_id, rec.index).second) {
        tsv::fail(ErrorCode::parse, items_file, lineno, "duplicate item id '" + rec.item_id + "'");
      }
      items.push_back(std::move(rec));
    }
  }
  if (items.empty()) throw Error(ErrorCode::invalid_argument, "empty corpus: " + items_file.string());

  std::vector<std::vector<std::string>> entities(items.size());
  std::size_t kept = 0;
  {
    auto in = tsv::open_input(entities_file);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty() || line == "\r") continue;
      auto cols = tsv::split(line);
      if (lineno == 1 && tsv::is_header(cols, "item_id")) continue;
      if (cols.size() != 3) {
        tsv::fail(ErrorCode::parse, entities_file, lineno, "expected item_id<TAB>entity<TAB>score");
      }
      auto it = index.find(std::string(cols[0]));
      if (it == index.end()) {
        tsv::fail(ErrorCode::not_found, entities_file, lineno,
                  "unknown item id '" + std::string(cols[0]) + "'");
      }
      double score = tsv::parse_double(cols[2], entities_file, lineno);
      if (score < 0.0 || score > 1.0) {
        tsv::fail(ErrorCode::parse, entities_file, lineno, "score outside [0,1]");
      }
      if (fold_entity(cols[1]).empty()) {
        tsv::fail(ErrorCode::parse, entities_file, lineno, "empty entity");
      }
      if (score < threshold) continue;
      entities[it->second].emplace_back(cols[1]);
      ++kept;
    }
  }
  if (kept == 0) {
    throw Error(ErrorCode::invalid_argument,
                "no entity passes the threshold in " + entities_file.string());
  }
  return ItemCorpus(std::move(items), entities);
}

void write_corpus(const ItemCorpus& corpus, const std::filesystem::path& items_file,
                  const std::filesystem::path& entities_file) {
  std::ofstream items(items_file);
  std::ofstream ents(entities_file);
  if (!items || !ents) throw Error(ErrorCode::io, "cannot write corpus files");
  items << "item_id\ttitle\tdocument\n";
  ents << "item_id\tentity\tscore\n";
  for (std::size_t d = 0; d < corpus.num_items(); ++d) {
    const auto& rec = corpus.item(d);
    items << rec.item_id << '\t' << tsv::escape(rec.title) << '\t' << tsv::escape(rec.document)
          << '\n';
    for (auto e : corpus.entities_of(d)) ents << rec.item_id << '\t' << corpus.entity(e) << "\t1\n";
  }
  if (!items || !ents) throw Error(ErrorCode::io, "write failed");
}

namespace {

constexpr std::array<std::string_view, 128> kStopWords = {
    "a",        "about",   "above",  "after",  "again",   "against", "all",     "also",
    "am",       "an",      "and",    "any",    "are",     "as",      "at",      "be",
    "because",  "been",    "before", "being",  "below",   "between", "both",    "but",
    "by",       "can",     "could",  "did",    "do",      "does",    "doing",   "down",
    "during",   "each",    "even",   "few",    "for",     "from",    "further", "get",
    "had",      "has",     "have",   "having", "he",      "her",     "here",    "hers",
    "him",      "his",     "how",    "i",      "if",      "in",      "into",    "is",
    "it",       "its",     "itself", "just",   "me",      "more",    "most",    "my",
    "no",       "nor",     "not",    "now",    "of",      "off",     "on",      "once",
    "only",     "or",      "other",  "our",    "ours",    "out",     "over",    "own",
    "same",     "she",     "should", "so",     "some",    "such",    "than",    "that",
    "the",      "their",   "them",   "then",   "there",   "these",   "they",    "this",
    "those",    "through", "to",     "too",    "under",   "until",   "up",      "very",
    "was",      "we",      "well",   "were",   "what",    "when",    "where",   "which",
    "while",    "who",     "whom",   "why",    "will",    "with",    "would",   "you",
    "your",     "yours",   "s",      "t",      "don",     "really",  "much",    "many",
};

}  // namespace

bool is_stop_word(std::string_view token) {
  return std::find(kStopWords.begin(), kStopWords.end(), token) != kStopWords.end();
}

std::vector<ScoredEntity> heuristic_entities(std::string_view document, double threshold) {
  // Split into runs of content tokens; punctuation and stop words end a run.
  std::vector<std::vector<std::string>> runs(1);
  std::string token;
  auto flush_token = [&] {
    if (token.empty()) return;
    if (is_stop_word(token)) {
      if (!runs.back().empty()) runs.emplace_back();
    } else {
      runs.back().push_back(token);
    }
    token.clear();
  };
  for (char raw : document) {
    auto c = static_cast<unsigned char>(raw);
    if (std::isalnum(c)) {
      token.push_back(static_cast<char>(std::tolower(c)));
    } else if (c == '\'') {
      continue;
    } else {
      flush_token();
      if (!std::isspace(c) && !runs.back().empty()) runs.emplace_back();
    }
  }
  flush_token();

  std::map<std::string, std::size_t> counts;
  for (const auto& run : runs) {
    for (std::size_t i = 0; i < run.size(); ++i) {
      std::string phrase;
      for (std::size_t n = 0; n < 3 && i + n < run.size(); ++n) {
        if (n > 0) phrase.push_back(' ');
        phrase += run[i + n];
        ++counts[phrase];
      }
    }
  }
  if (counts.empty()) return {};

  std::size_t max_count = 0;
  for (const auto& [_, c] : counts) max_count = std::max(max_count, c);

  std::vector<ScoredEntity> out;
  for (const auto& [phrase, c] : counts) {
    double score = static_cast<double>(c) / static_cast<double>(max_count);
    if (score >= threshold) out.push_back({phrase, score});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const ScoredEntity& a, const ScoredEntity& b) { return a.score > b.score; });
  return out;
}

std::string render_question(std::string_view entity) {
  std::string out = "Are you seeking for a [";
  out += entity;
  out += "] related item?";
  return out;
}

QuestionPool::QuestionPool(std::size_t num_entities)
    : available_(num_entities, true), remaining_(num_entities) {}

void QuestionPool::take(std::size_t entity) {
  if (!contains(entity)) {
    throw Error(ErrorCode::state,
                "entity " + std::to_string(entity) + " is not available in the question pool");
  }
  available_[entity] = false;
  --remaining_;
}

std::vector<std::size_t> QuestionPool::available() const {
  std::vector<std::size_t> out;
  out.reserve(remaining_);
  for (std::size_t e = 0; e < available_.size(); ++e) {
    if (available_[e]) out.push_back(e);
  }
  return out;
}

}  // namespace qrec
