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
#include "qrec/factorization.hpp"
#include "qrec/ratings.hpp"
#include "qrec/session.hpp"

#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

namespace qrec::testing {

inline std::shared_ptr<ItemCorpus> make_corpus(
    const std::vector<std::vector<std::string>>& item_entities,
    const std::vector<std::string>& vocabulary = {}) {
  std::vector<ItemRecord> items;
  for (std::size_t d = 0; d < item_entities.size(); ++d) {
    items.push_back({"item" + std::to_string(d), d, "Item " + std::to_string(d), ""});
  }
  return std::make_shared<ItemCorpus>(std::move(items), item_entities, vocabulary);
}

// 4 items; A in {0,1}, B in {0,1,2}, C in none, D in {0,2}.
inline std::shared_ptr<ItemCorpus> toy_corpus() {
  return make_corpus({{"a", "b", "d"}, {"a", "b"}, {"b", "d"}, {}}, {"a", "b", "c", "d"});
}

inline LatentModel random_model(std::size_t users, std::size_t items, int k, std::mt19937_64& rng,
                                double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  auto m = LatentModel::zeros(users, items, k);
  for (Eigen::Index r = 0; r < m.U.rows(); ++r)
    for (Eigen::Index c = 0; c < k; ++c) m.U(r, c) = g(rng);
  for (Eigen::Index r = 0; r < m.V.rows(); ++r)
    for (Eigen::Index c = 0; c < k; ++c) m.V(r, c) = g(rng);
  for (Eigen::Index c = 0; c < k; ++c) m.p[c] = 1.0 + 0.3 * g(rng);
  return m;
}

// Each (user, item) pair is observed with probability `density`.
inline RatingMatrix random_ratings(std::size_t users, std::size_t items, double density,
                                   std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> value(1, 5);
  std::vector<Rating> triples;
  for (std::size_t i = 0; i < users; ++i)
    for (std::size_t j = 0; j < items; ++j)
      if (unit(rng) < density) {
        triples.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                           static_cast<double>(value(rng))});
      }
  return RatingMatrix(users, items, std::move(triples));
}

inline std::vector<double> random_affinity(std::size_t items, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> y(0, 4);
  std::vector<double> out(items);
  for (auto& v : out) v = y(rng);
  return out;
}

// Small warm context: 6 users, the toy corpus, a trained model.
inline std::shared_ptr<SessionContext> toy_context(std::uint64_t seed = 3) {
  auto corpus = toy_corpus();
  std::vector<Rating> triples = {{0, 0, 5}, {0, 2, 2}, {1, 1, 4}, {2, 3, 5},
                                 {3, 0, 1}, {4, 2, 3}, {4, 1, 5}};
  auto ratings = std::make_shared<RatingMatrix>(6, 4, triples);
  HyperParams hp;
  hp.seed = seed;
  auto model = std::make_shared<LatentModel>(train_offline(*ratings, hp));
  return std::make_shared<SessionContext>(corpus, ratings, model);
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("qrec_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path write(const std::string& name, const std::string& text) const {
    auto file = path_ / name;
    std::ofstream(file) << text;
    return file;
  }

 private:
  std::filesystem::path path_;
};

}  // namespace qrec::testing
