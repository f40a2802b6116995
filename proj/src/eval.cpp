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

#include "qrec/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_set>

namespace qrec {

void SplitSpec::validate() const {
  if (!(train > 0 && validation > 0 && test > 0) ||
      std::abs(train + validation + test - 1.0) > 1e-9) {
    throw Error(ErrorCode::invalid_argument, "split fractions must be positive and sum to 1");
  }
}

Split split_dataset(std::span<const Rating> ratings, const SplitSpec& spec) {
  spec.validate();
  if (ratings.empty()) throw Error(ErrorCode::invalid_argument, "cannot split an empty rating set");
  const std::size_t n = ratings.size();
  const double fractions[3] = {spec.train, spec.validation, spec.test};
  std::size_t sizes[3];
  double remainders[3];
  std::size_t assigned = 0;
  for (int p = 0; p < 3; ++p) {
    double exact = fractions[p] * static_cast<double>(n);
    sizes[p] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    remainders[p] = exact - static_cast<double>(sizes[p]);
    assigned += sizes[p];
  }
  while (assigned < n) {
    int best = 0;
    for (int p = 1; p < 3; ++p) {
      if (remainders[p] > remainders[best]) best = p;
    }
    ++sizes[best];
    remainders[best] = -1.0;
    ++assigned;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(spec.seed);
  std::shuffle(order.begin(), order.end(), rng);

  Split out;
  std::vector<Rating>* parts[3] = {&out.train, &out.validation, &out.test};
  std::size_t cursor = 0;
  for (int p = 0; p < 3; ++p) {
    std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(cursor),
                                 order.begin() + static_cast<std::ptrdiff_t>(cursor + sizes[p]));
    std::sort(idx.begin(), idx.end());
    for (auto i : idx) parts[p]->push_back(ratings[i]);
    cursor += sizes[p];
  }
  return out;
}

RankMetrics metrics_for_rank(std::size_t rank) {
  if (rank == 0) throw Error(ErrorCode::invalid_argument, "rank is 1-based");
  const double r = static_cast<double>(rank);
  RankMetrics m;
  m.recall5 = rank <= 5 ? 1.0 : 0.0;
  m.ap5 = rank <= 5 ? 1.0 / r : 0.0;
  m.ndcg = rank <= 100 ? 1.0 / std::log2(r + 1.0) : 0.0;
  m.mrr = 1.0 / r;
  return m;
}

RankMetrics metrics_for_ranking(std::span<const std::uint32_t> ranking, std::uint32_t target) {
  auto it = std::find(ranking.begin(), ranking.end(), target);
  if (it == ranking.end()) {
    throw Error(ErrorCode::invalid_argument, "target item is not in the ranking");
  }
  return metrics_for_rank(static_cast<std::size_t>(it - ranking.begin()) + 1);
}

std::string_view to_string(Policy policy) {
  switch (policy) {
    case Policy::qrec: return "qrec";
    case Policy::random_question: return "random_question";
    case Policy::uniform_prior_sbs: return "uniform_prior_sbs";
  }
  return "?";
}

Policy parse_policy(std::string_view name) {
  if (name == "qrec") return Policy::qrec;
  if (name == "random_question" || name == "random") return Policy::random_question;
  if (name == "uniform_prior_sbs" || name == "sbs") return Policy::uniform_prior_sbs;
  throw Error(ErrorCode::invalid_argument, "unknown policy '" + std::string(name) + "'");
}

const MetricsRow& MetricsReport::at(std::size_t nq) const {
  for (const auto& row : rows) {
    if (row.nq == nq) return row;
  }
  throw Error(ErrorCode::not_found, "no report row for N_q=" + std::to_string(nq));
}

std::string MetricsReport::to_csv(bool header) const {
  std::ostringstream out;
  if (header) out << "policy,N_q,recall@5,AP@5,NDCG,MRR,sessions\n";
  char buf[160];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof buf, "%s,%zu,%.6f,%.6f,%.6f,%.6f,%zu\n", row.policy.c_str(), row.nq,
                  row.mean.recall5, row.mean.ap5, row.mean.ndcg, row.mean.mrr, row.sessions);
    out << buf;
  }
  return out.str();
}

std::string describe(const HyperParams& hp) {
  std::ostringstream out;
  out << "latent_dim=" << hp.latent_dim << "\nlambda_u=" << hp.lambda_u
      << "\nlambda_v=" << hp.lambda_v << "\nlambda_p=" << hp.lambda_p
      << "\nlambda_q=" << hp.lambda_q << "\ngamma=" << hp.gamma << "\nmax_iters=" << hp.max_iters
      << "\nadam_lr=" << hp.adam_lr << "\nadam_beta1=" << hp.adam_beta1
      << "\nadam_beta2=" << hp.adam_beta2 << "\nadam_eps=" << hp.adam_eps
      << "\ninit_stddev=" << hp.init_stddev << "\nseed=" << hp.seed
      << "\nals_sweeps=" << hp.als_sweeps << '\n';
  return out.str();
}

namespace {

SessionOptions session_options(const ExperimentConfig& config, std::size_t session_index) {
  SessionOptions opts;
  opts.hp = config.hp;
  opts.policy = config.policy == Policy::random_question ? QuestionPolicy::random : QuestionPolicy::gbs;
  opts.prior = config.policy == Policy::uniform_prior_sbs ? PriorKind::uniform : PriorKind::ranked;
  std::seed_seq seq{config.seed, static_cast<std::uint64_t>(session_index)};
  std::uint64_t words[2];
  seq.generate(words, words + 2);
  opts.seed = words[0] ^ (words[1] << 32);
  return opts;
}

std::shared_ptr<const SessionContext> make_context(const ExperimentData& data,
                                                   const ExperimentConfig& config) {
  std::shared_ptr<const LatentModel> model = data.model;
  if (config.init == InitMode::random) {
    model = std::make_shared<LatentModel>(
        LatentModel::initial(data.train->num_users(), data.train->num_items(), config.hp));
  }
  return std::make_shared<SessionContext>(data.corpus, data.train, model);
}

}  // namespace

MetricsReport run_experiment(const ExperimentData& data, const ExperimentConfig& config) {
  config.hp.validate();
  if (config.nq.empty()) throw Error(ErrorCode::invalid_argument, "N_q list is empty");
  if (!data.corpus || !data.train || !data.model) {
    throw Error(ErrorCode::invalid_argument, "experiment data is incomplete");
  }
  auto context = make_context(data, config);
  const std::size_t max_nq = *std::max_element(config.nq.begin(), config.nq.end());

  std::vector<RankMetrics> sums(config.nq.size());
  for (std::size_t s = 0; s < data.test.size(); ++s) {
    const auto& triple = data.test[s];
    auto traj = run_session(context, triple.user, triple.item, max_nq, session_options(config, s),
                            /*keep_rankings=*/false);
    for (std::size_t c = 0; c < config.nq.size(); ++c) {
      auto m = metrics_for_rank(traj.target_rank_at(config.nq[c]));
      sums[c].recall5 += m.recall5;
      sums[c].ap5 += m.ap5;
      sums[c].ndcg += m.ndcg;
      sums[c].mrr += m.mrr;
    }
  }

  MetricsReport report;
  const double n = data.test.empty() ? 1.0 : static_cast<double>(data.test.size());
  const std::string label = config.label.empty() ? std::string(to_string(config.policy)) : config.label;
  for (std::size_t c = 0; c < config.nq.size(); ++c) {
    RankMetrics mean{sums[c].recall5 / n, sums[c].ap5 / n, sums[c].ndcg / n, sums[c].mrr / n};
    report.rows.push_back({label, config.nq[c], mean, data.test.size()});
  }
  std::ostringstream echo;
  echo << "policy=" << to_string(config.policy)
       << "\ninit=" << (config.init == InitMode::offline ? "offline" : "random")
       << "\nexperiment_seed=" << config.seed << "\nsessions=" << data.test.size() << '\n'
       << describe(config.hp);
  report.config_echo = echo.str();
  return report;
}

ColdTuples extract_cold_tuples(std::span<const Rating> train, std::span<const Rating> test) {
  std::unordered_set<std::uint32_t> users, items;
  for (const auto& r : train) {
    users.insert(r.user);
    items.insert(r.item);
  }
  ColdTuples out;
  for (const auto& r : test) {
    if (!users.contains(r.user)) out.cold_user.push_back(r);
    if (!items.contains(r.item)) out.cold_item.push_back(r);
  }
  return out;
}

AblationReport ablation_offline_init(const ExperimentData& data, const ExperimentConfig& config) {
  AblationReport out;
  auto arm = config;
  arm.init = InitMode::offline;
  arm.label = "offline_init";
  out.offline = run_experiment(data, arm);
  arm.init = InitMode::random;
  arm.label = "random_init";
  out.random = run_experiment(data, arm);
  return out;
}

std::vector<SweepPoint> sweep(SweepParam param, std::span<const double> grid,
                              const ExperimentData& data, const ExperimentConfig& config) {
  if (grid.empty()) throw Error(ErrorCode::invalid_argument, "sweep grid is empty");
  std::vector<SweepPoint> out;
  for (double value : grid) {
    auto point_config = config;
    auto point_data = data;
    char label[64];
    if (param == SweepParam::gamma) {
      point_config.hp.gamma = value;
      std::snprintf(label, sizeof label, "gamma=%g", value);
    } else {
      point_config.hp.latent_dim = static_cast<int>(std::lround(value));
      point_data.model =
          std::make_shared<LatentModel>(train_offline(*data.train, point_config.hp));
      std::snprintf(label, sizeof label, "K=%d", point_config.hp.latent_dim);
    }
    point_config.label = label;
    out.push_back({value, run_experiment(point_data, point_config)});
  }
  return out;
}

std::vector<double> make_grid(double from, double to, double step) {
  if (!(step > 0) || to < from) throw Error(ErrorCode::invalid_argument, "invalid sweep grid");
  std::vector<double> grid;
  for (std::size_t i = 0;; ++i) {
    double v = from + static_cast<double>(i) * step;
    if (v > to + step * 1e-9) break;
    grid.push_back(v);
  }
  return grid;
}

}  // namespace qrec
