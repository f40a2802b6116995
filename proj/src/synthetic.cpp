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

#include "qrec/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <string>

namespace qrec {

namespace {

constexpr std::array<std::string_view, 24> kModifiers = {
    "cotton",   "steel",    "bamboo",  "ceramic", "glass",    "wooden",  "silicone", "copper",
    "linen",    "velvet",   "marble",  "leather", "wireless", "compact", "vintage",  "modern",
    "rustic",   "organic",  "foldable","heavy",   "portable", "nonstick","waterproof","quilted"};

constexpr std::array<std::string_view, 24> kNouns = {
    "towel",  "kettle", "blender", "skillet", "mug",     "pillow",  "blanket", "lamp",
    "rack",   "basket", "bowl",    "knife",   "grinder", "teapot",  "curtain", "rug",
    "shelf",  "tray",   "scale",   "timer",   "brush",   "spatula", "cushion", "vase"};

std::vector<std::string> entity_names(std::size_t count) {
  std::vector<std::string> names;
  names.reserve(count);
  for (std::size_t i = 0; names.size() < count; ++i) {
    std::size_t a = i % kModifiers.size();
    std::size_t b = (i / kModifiers.size()) % kNouns.size();
    std::size_t round = i / (kModifiers.size() * kNouns.size());
    std::string name = std::string(kModifiers[a]) + " " + std::string(kNouns[b]);
    if (round > 0) name += " " + std::to_string(round + 1);
    names.push_back(std::move(name));
  }
  return names;
}

Matrix gaussian(std::size_t rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(static_cast<Eigen::Index>(rows), cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
  return m;
}

// Each user rates a handful of items drawn (without replacement) with weight
// exp(sharpness * affinity + popularity); ratings are a noisy 1..5 reading of
// the affinity.
std::vector<Rating> planted_ratings(const Matrix& users, const Matrix& items,
                                    const Eigen::VectorXd& popularity, std::size_t min_n,
                                    std::size_t max_n, double sharpness, double center,
                                    double slope, std::mt19937_64& rng) {
  std::vector<Rating> out;
  std::uniform_int_distribution<std::size_t> count(min_n, max_n);
  std::normal_distribution<double> noise(0.0, 0.5);
  const double scale = 1.0 / std::sqrt(static_cast<double>(users.cols()));
  for (Eigen::Index u = 0; u < users.rows(); ++u) {
    Eigen::VectorXd affinity = items * users.row(u).transpose() * scale;
    std::vector<double> weight(static_cast<std::size_t>(items.rows()));
    for (std::size_t j = 0; j < weight.size(); ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      weight[j] = std::exp(sharpness * affinity[jj] + popularity[jj]);
    }
    std::size_t n = std::min(count(rng), weight.size());
    for (std::size_t t = 0; t < n; ++t) {
      std::discrete_distribution<std::size_t> pick(weight.begin(), weight.end());
      std::size_t j = pick(rng);
      weight[j] = 0.0;
      double value = std::round(center + slope * affinity[static_cast<Eigen::Index>(j)] + noise(rng));
      value = std::clamp(value, 1.0, 5.0);
      out.push_back({static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(j), value});
    }
  }
  return out;
}

std::string make_document(const std::vector<std::string>& names, const std::vector<std::size_t>& ents) {
  std::string doc = "A well made item.";
  for (auto e : ents) doc += " Great " + names[e] + ".";
  return doc;
}

}  // namespace

SyntheticDataset generate_benchmark(const SyntheticConfig& config) {
  if (config.items == 0 || config.entities == 0 || config.users == 0 || config.true_dim < 1 ||
      config.min_ratings_per_user > config.max_ratings_per_user) {
    throw Error(ErrorCode::invalid_argument, "invalid synthetic benchmark configuration");
  }
  std::mt19937_64 rng(config.seed);
  const std::size_t total_users = config.users + config.held_out_users;
  Matrix user_taste = gaussian(total_users, config.true_dim, rng);
  Matrix item_traits = gaussian(config.items, config.true_dim, rng);
  Eigen::VectorXd popularity = config.popularity_skew * gaussian(config.items, 1, rng).col(0);

  auto names = entity_names(config.entities);
  std::vector<std::vector<std::size_t>> item_entities(config.items);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> g(0.0, 1.0);
  const auto topical = static_cast<std::size_t>(std::round(config.topical_fraction *
                                                           static_cast<double>(config.entities)));
  for (std::size_t e = 0; e < config.entities; ++e) {
    double density = config.min_entity_density +
                     (config.max_entity_density - config.min_entity_density) * unit(rng);
    if (e < topical) {
      // Keep the items whose projection on a random direction is largest.
      Eigen::VectorXd dir(config.true_dim);
      for (int k = 0; k < config.true_dim; ++k) dir[k] = g(rng);
      Eigen::VectorXd proj = item_traits * dir;
      std::vector<std::pair<double, std::size_t>> order;
      for (std::size_t j = 0; j < config.items; ++j) {
        order.emplace_back(proj[static_cast<Eigen::Index>(j)] + 0.3 * g(rng), j);
      }
      std::sort(order.begin(), order.end(), std::greater<>());
      auto n = std::max<std::size_t>(1, static_cast<std::size_t>(density * static_cast<double>(config.items)));
      for (std::size_t t = 0; t < n; ++t) item_entities[order[t].second].push_back(e);
    } else {
      for (std::size_t j = 0; j < config.items; ++j) {
        if (unit(rng) < density) item_entities[j].push_back(e);
      }
    }
  }
  // Distinct, non-empty signatures.
  std::uniform_int_distribution<std::size_t> any_entity(0, config.entities - 1);
  std::set<std::vector<std::size_t>> seen;
  for (std::size_t j = 0; j < config.items; ++j) {
    auto& ents = item_entities[j];
    std::sort(ents.begin(), ents.end());
    while (ents.empty() || seen.contains(ents)) {
      ents.push_back(any_entity(rng));
      std::sort(ents.begin(), ents.end());
      ents.erase(std::unique(ents.begin(), ents.end()), ents.end());
    }
    seen.insert(ents);
  }

  std::vector<ItemRecord> records;
  std::vector<std::vector<std::string>> entity_strings(config.items);
  for (std::size_t j = 0; j < config.items; ++j) {
    char id[32];
    std::snprintf(id, sizeof id, "I%04zu", j);
    ItemRecord rec;
    rec.item_id = id;
    rec.title = "Item " + std::to_string(j) + ": " + names[item_entities[j].front()];
    rec.document = make_document(names, item_entities[j]);
    records.push_back(std::move(rec));
    for (auto e : item_entities[j]) entity_strings[j].push_back(names[e]);
  }

  SyntheticDataset out;
  out.dataset.corpus = std::make_shared<ItemCorpus>(std::move(records), entity_strings);
  for (std::size_t u = 0; u < total_users; ++u) {
    char id[32];
    std::snprintf(id, sizeof id, "U%05zu", u);
    out.dataset.user_ids.emplace_back(id);
  }
  out.dataset.ratings =
      planted_ratings(user_taste, item_traits, popularity, config.min_ratings_per_user,
                      config.max_ratings_per_user, config.taste_sharpness, config.rating_center,
                      config.rating_slope, rng);
  for (std::size_t u = config.users; u < total_users; ++u) {
    out.held_out_users.push_back(static_cast<std::uint32_t>(u));
  }
  return out;
}

Dataset binary_code_dataset(std::size_t users, bool with_redundant, std::uint64_t seed) {
  constexpr std::size_t kItems = 64;
  std::vector<ItemRecord> records;
  std::vector<std::vector<std::string>> entities(kItems);
  for (std::size_t d = 0; d < kItems; ++d) {
    char id[32];
    std::snprintf(id, sizeof id, "B%02zu", d);
    records.push_back({id, d, "Binary item " + std::to_string(d), {}});
    for (int b = 0; b < 6; ++b) {
      if ((d >> b) & 1U) entities[d].push_back("bit " + std::to_string(b));
    }
  }
  std::vector<std::string> vocab_order = {"bit 0", "bit 1", "bit 2", "bit 3", "bit 4", "bit 5"};
  if (with_redundant) {
    vocab_order.insert(vocab_order.end(), {"catalog", "first block", "rare"});
    for (std::size_t d = 0; d < kItems; ++d) {
      entities[d].push_back("catalog");
      if (d < 16) entities[d].push_back("first block");
      if (d < 3) entities[d].push_back("rare");
    }
  }
  Dataset ds;
  ds.corpus = std::make_shared<ItemCorpus>(std::move(records), entities, vocab_order);

  std::mt19937_64 rng(seed);
  Matrix taste = gaussian(users, 3, rng);
  Matrix traits = gaussian(kItems, 3, rng);
  std::vector<std::uint32_t> order(kItems);
  std::iota(order.begin(), order.end(), 0U);
  std::shuffle(order.begin(), order.end(), rng);
  std::normal_distribution<double> noise(0.0, 0.5);
  for (std::size_t u = 0; u < users; ++u) {
    char id[32];
    std::snprintf(id, sizeof id, "BU%03zu", u);
    ds.user_ids.emplace_back(id);
    // One rating per user, spread evenly over the items.
    std::uint32_t j = order[u % kItems];
    double affinity = traits.row(j).dot(taste.row(static_cast<Eigen::Index>(u))) / std::sqrt(3.0);
    double value = std::clamp(std::round(3.0 + 1.2 * affinity + noise(rng)), 1.0, 5.0);
    ds.ratings.push_back({static_cast<std::uint32_t>(u), j, value});
  }
  return ds;
}

}  // namespace qrec
