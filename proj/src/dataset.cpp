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

#include "qrec/dataset.hpp"

#include <unordered_map>

namespace qrec {

std::optional<std::size_t> Dataset::find_user(std::string_view user_id) const {
  for (std::size_t i = 0; i < user_ids.size(); ++i) {
    if (user_ids[i] == user_id) return i;
  }
  return std::nullopt;
}

RatingMatrix Dataset::matrix(std::span<const Rating> triples) const {
  return RatingMatrix(num_users(), num_items(), std::vector<Rating>(triples.begin(), triples.end()));
}

std::uint64_t Dataset::fingerprint() const {
  Fingerprint fp;
  fp.add_pod(corpus ? corpus->fingerprint() : 0);
  for (const auto& id : user_ids) fp.add(id);
  for (const auto& r : ratings) {
    fp.add_pod(r.user);
    fp.add_pod(r.item);
    fp.add_pod(r.value);
  }
  return fp.value();
}

DatasetSummary summarize(const Dataset& dataset) {
  DatasetSummary s;
  s.users = dataset.num_users();
  s.items = dataset.num_items();
  s.entities = dataset.corpus ? dataset.corpus->num_entities() : 0;
  s.ratings = dataset.ratings.size();
  if (s.users > 0 && s.items > 0) {
    s.density = static_cast<double>(s.ratings) / (static_cast<double>(s.users) * static_cast<double>(s.items));
  }
  return s;
}

DatasetFiles DatasetFiles::in(const std::filesystem::path& dir) {
  return {dir / "items.tsv", dir / "entities.tsv", dir / "ratings.tsv"};
}

Dataset load_dataset(const DatasetFiles& files, double entity_threshold,
                     const RatingsLoadOptions& options) {
  Dataset ds;
  auto corpus = std::make_shared<ItemCorpus>(ingest_corpus(files.items, files.entities, entity_threshold));
  auto loaded = load_ratings(files.ratings, *corpus, options);
  ds.corpus = std::move(corpus);
  ds.user_ids = std::move(loaded.user_ids);
  ds.ratings = std::move(loaded.triples);
  return ds;
}

void write_dataset(const Dataset& dataset, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::io, "cannot create " + dir.string());
  auto files = DatasetFiles::in(dir);
  write_corpus(*dataset.corpus, files.items, files.entities);
  write_ratings(files.ratings, dataset.user_ids, *dataset.corpus, dataset.ratings);
}

}  // namespace qrec
