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
#include "qrec/factorization.hpp"
#include "qrec/session.hpp"

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace qrec {

struct SplitSpec {
  double train = 0.8;
  double validation = 0.1;
  double test = 0.1;
  std::uint64_t seed = 42;

  void validate() const;
};

struct Split {
  std::vector<Rating> train;
  std::vector<Rating> validation;
  std::vector<Rating> test;
};

// Seeded triple-level shuffle; part sizes by largest remainder.
Split split_dataset(std::span<const Rating> ratings, const SplitSpec& spec);

struct RankMetrics {
  double recall5 = 0.0;
  double ap5 = 0.0;
  double ndcg = 0.0;
  double mrr = 0.0;

  bool operator==(const RankMetrics&) const = default;
};

// Single relevant item at 1-based rank r.
RankMetrics metrics_for_rank(std::size_t rank);
// Throws invalid_argument if the target is not in the ranking.
RankMetrics metrics_for_ranking(std::span<const std::uint32_t> ranking, std::uint32_t target);

enum class Policy { qrec, random_question, uniform_prior_sbs };
enum class InitMode { offline, random };

std::string_view to_string(Policy policy);
Policy parse_policy(std::string_view name);  // throws invalid_argument

struct MetricsRow {
  std::string policy;
  std::size_t nq = 0;
  RankMetrics mean;
  std::size_t sessions = 0;
};

struct MetricsReport {
  std::vector<MetricsRow> rows;
  std::string config_echo;  // key=value lines

  const MetricsRow& at(std::size_t nq) const;
  // policy,N_q,recall@5,AP@5,NDCG,MRR,sessions
  std::string to_csv(bool header = true) const;
};

// Inputs shared by every arm of an experiment.
struct ExperimentData {
  std::shared_ptr<const ItemCorpus> corpus;
  std::shared_ptr<const RatingMatrix> train;
  std::shared_ptr<const LatentModel> model;  // trained on `train`
  std::vector<Rating> test;
};

struct ExperimentConfig {
  Policy policy = Policy::qrec;
  InitMode init = InitMode::offline;
  std::vector<std::size_t> nq = {2, 5, 10, 15, 20};
  HyperParams hp;           // online gamma, regularizers, ALS sweeps; seed for random init
  std::uint64_t seed = 42;  // per-session seeds derive from this
  std::string label;        // report policy column; defaults to the policy name
};

// One simulated session per test triple (user, target = rated item).
MetricsReport run_experiment(const ExperimentData& data, const ExperimentConfig& config);

struct ColdTuples {
  std::vector<Rating> cold_user;
  std::vector<Rating> cold_item;
};

ColdTuples extract_cold_tuples(std::span<const Rating> train, std::span<const Rating> test);

struct AblationReport {
  MetricsReport offline;  // arm A: trained model
  MetricsReport random;   // arm B: untrained initialization
};

AblationReport ablation_offline_init(const ExperimentData& data, const ExperimentConfig& config);

enum class SweepParam { gamma, latent_dim };

struct SweepPoint {
  double value = 0.0;
  MetricsReport report;
};

// Gamma points reuse data.model; latent_dim points retrain on data.train with
// config.hp and the given K.
std::vector<SweepPoint> sweep(SweepParam param, std::span<const double> grid,
                              const ExperimentData& data, const ExperimentConfig& config);

// from, from+step, ..., to (inclusive within a small tolerance).
std::vector<double> make_grid(double from, double to, double step);

std::string describe(const HyperParams& hp);

}  // namespace qrec
