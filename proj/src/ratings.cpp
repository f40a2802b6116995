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

#include "qrec/ratings.hpp"

#include "qrec/corpus.hpp"
#include "tsv.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>
#include <utility>

namespace qrec {

namespace {

void build_adjacency(std::size_t buckets, std::span<const Rating> triples, bool by_user,
                     std::vector<std::uint32_t>& offsets, std::vector<std::uint32_t>& entries) {
  offsets.assign(buckets + 1, 0);
  for (const auto& r : triples) ++offsets[(by_user ? r.user : r.item) + 1];
  for (std::size_t b = 0; b < buckets; ++b) offsets[b + 1] += offsets[b];
  entries.assign(triples.size(), 0);
  std::vector<std::uint32_t> cursor(offsets.begin(), offsets.end() - 1);
  for (std::uint32_t t = 0; t < triples.size(); ++t) {
    auto key = by_user ? triples[t].user : triples[t].item;
    entries[cursor[key]++] = t;
  }
}

}  // namespace

RatingMatrix::RatingMatrix(std::size_t num_users, std::size_t num_items, std::vector<Rating> triples)
    : num_users_(num_users), num_items_(num_items), triples_(std::move(triples)) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> keys;
  keys.reserve(triples_.size());
  for (const auto& r : triples_) {
    if (r.user >= num_users_ || r.item >= num_items_) {
      throw Error(ErrorCode::invalid_argument, "rating index out of range");
    }
    if (!std::isfinite(r.value)) throw Error(ErrorCode::invalid_argument, "non-finite rating");
    keys.emplace_back(r.user, r.item);
  }
  std::sort(keys.begin(), keys.end());
  if (std::adjacent_find(keys.begin(), keys.end()) != keys.end()) {
    throw Error(ErrorCode::invalid_argument, "duplicate (user, item) rating");
  }
  build_adjacency(num_users_, triples_, true, by_user_offsets_, by_user_);
  build_adjacency(num_items_, triples_, false, by_item_offsets_, by_item_);
}

std::span<const std::uint32_t> RatingMatrix::user_entries(std::size_t user) const {
  if (user >= num_users_) throw Error(ErrorCode::invalid_argument, "user index out of range");
  return std::span<const std::uint32_t>(by_user_).subspan(
      by_user_offsets_[user], by_user_offsets_[user + 1] - by_user_offsets_[user]);
}

std::span<const std::uint32_t> RatingMatrix::item_entries(std::size_t item) const {
  if (item >= num_items_) throw Error(ErrorCode::invalid_argument, "item index out of range");
  return std::span<const std::uint32_t>(by_item_).subspan(
      by_item_offsets_[item], by_item_offsets_[item + 1] - by_item_offsets_[item]);
}

LoadedRatings load_ratings(const std::filesystem::path& file, const ItemCorpus& corpus,
                           const RatingsLoadOptions& options) {
  struct Raw {
    std::string user;
    std::uint32_t item;
    double value;
  };
  std::vector<Raw> raw;
  std::map<std::pair<std::string, std::uint32_t>, std::size_t> seen;

  auto in = tsv::open_input(file);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto cols = tsv::split(line);
    if (lineno == 1 && tsv::is_header(cols, "user_id")) continue;
    if (cols.size() != 3 || cols[0].empty()) {
      tsv::fail(ErrorCode::parse, file, lineno, "expected user_id<TAB>item_id<TAB>rating");
    }
    auto item = corpus.find_item(cols[1]);
    if (!item) {
      tsv::fail(ErrorCode::not_found, file, lineno, "unknown item id '" + std::string(cols[1]) + "'");
    }
    double value = tsv::parse_double(cols[2], file, lineno);
    auto key = std::make_pair(std::string(cols[0]), static_cast<std::uint32_t>(*item));
    auto [it, inserted] = seen.emplace(key, lineno);
    if (!inserted) {
      tsv::fail(ErrorCode::parse, file, lineno,
                "duplicate rating for user '" + key.first + "' and item '" + std::string(cols[1]) +
                    "' (first seen on line " + std::to_string(it->second) + ")");
    }
    raw.push_back({key.first, key.second, value});
  }
  if (raw.empty()) throw Error(ErrorCode::invalid_argument, "no ratings in " + file.string());

  if (options.min_item_transactions > 0) {
    std::vector<std::size_t> count(corpus.num_items(), 0);
    for (const auto& r : raw) ++count[r.item];
    std::erase_if(raw, [&](const Raw& r) { return count[r.item] < options.min_item_transactions; });
  }
  if (options.min_user_transactions > 0) {
    std::unordered_map<std::string, std::size_t> count;
    for (const auto& r : raw) ++count[r.user];
    std::erase_if(raw, [&](const Raw& r) { return count[r.user] < options.min_user_transactions; });
  }
  if (raw.empty()) throw Error(ErrorCode::invalid_argument, "no ratings left after filtering");

  LoadedRatings out;
  std::unordered_map<std::string, std::uint32_t> users;
  out.triples.reserve(raw.size());
  for (const auto& r : raw) {
    auto [it, inserted] = users.emplace(r.user, static_cast<std::uint32_t>(out.user_ids.size()));
    if (inserted) out.user_ids.push_back(r.user);
    out.triples.push_back({it->second, r.item, r.value});
  }
  return out;
}

void write_ratings(const std::filesystem::path& file, std::span<const std::string> user_ids,
                   const ItemCorpus& corpus, std::span<const Rating> triples) {
  std::ofstream out(file);
  if (!out) throw Error(ErrorCode::io, "cannot write " + file.string());
  out << "user_id\titem_id\trating\n";
  char buf[64];
  for (const auto& r : triples) {
    std::snprintf(buf, sizeof buf, "%.17g", r.value);
    out << user_ids[r.user] << '\t' << corpus.item(r.item).item_id << '\t' << buf << '\n';
  }
  if (!out) throw Error(ErrorCode::io, "write failed: " + file.string());
}

}  // namespace qrec
