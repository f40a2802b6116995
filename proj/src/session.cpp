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

#include "qrec/session.hpp"

#include <algorithm>
#include <numeric>

namespace qrec {

namespace {

Vector pweighted(const Vector& p, const auto& row) { return row.transpose().cwiseProduct(p); }

}  // namespace

ItemGramCache ItemGramCache::build(const LatentModel& model, const RatingMatrix& ratings) {
  const int k = model.latent_dim();
  ItemGramCache cache;
  cache.grams = Matrix::Zero(static_cast<Eigen::Index>(model.num_items()), k * k);
  cache.rhs = Matrix::Zero(static_cast<Eigen::Index>(model.num_items()), k);
  for (const auto& r : ratings.triples()) {
    Vector up = pweighted(model.p, model.U.row(r.user));
    Eigen::MatrixXd outer = up * up.transpose();
    cache.grams.row(r.item) += Eigen::Map<const Eigen::RowVectorXd>(outer.data(), k * k);
    cache.rhs.row(r.item) += r.value * up.transpose();
  }
  return cache;
}

SessionContext::SessionContext(std::shared_ptr<const ItemCorpus> corpus,
                               std::shared_ptr<const RatingMatrix> ratings,
                               std::shared_ptr<const LatentModel> model)
    : corpus_(std::move(corpus)), ratings_(std::move(ratings)), model_(std::move(model)) {
  if (!corpus_ || !ratings_ || !model_) {
    throw Error(ErrorCode::invalid_argument, "session context needs corpus, ratings and model");
  }
  if (model_->num_items() != corpus_->num_items() ||
      ratings_->num_items() != corpus_->num_items() ||
      model_->num_users() != ratings_->num_users()) {
    throw Error(ErrorCode::invalid_argument, "corpus, ratings and model dimensions disagree");
  }
  grams_ = ItemGramCache::build(*model_, *ratings_);
}

OnlineFactors::OnlineFactors(const SessionContext& context, std::optional<std::size_t> user)
    : context_(&context), user_(user) {
  const auto& model = context.model();
  if (user_ && *user_ >= model.num_users()) {
    throw Error(ErrorCode::not_found, "unknown user index " + std::to_string(*user_));
  }
  has_history_ = user_ && context.ratings().has_user(*user_);
  u_ = has_history_ ? Vector(model.U.row(static_cast<Eigen::Index>(*user_)).transpose())
                    : Vector::Zero(model.latent_dim());
  V_ = model.V;
  grams_ = context.item_grams();
}

void OnlineFactors::set_user_factor(const Vector& u) {
  if (has_history_) {
    const auto& model = context_->model();
    const int k = model.latent_dim();
    Vector old_up = u_.cwiseProduct(model.p);
    Vector new_up = u.cwiseProduct(model.p);
    Eigen::MatrixXd delta = new_up * new_up.transpose() - old_up * old_up.transpose();
    Eigen::Map<const Eigen::RowVectorXd> flat(delta.data(), k * k);
    const auto triples = context_->ratings().triples();
    for (auto t : context_->ratings().user_entries(*user_)) {
      const auto& r = triples[t];
      grams_.grams.row(r.item) += flat;
      grams_.rhs.row(r.item) += r.value * (new_up - old_up).transpose();
    }
  }
  u_ = u;
}

void OnlineFactors::update_user(std::span<const double> affinity, const HyperParams& hp) {
  const auto& model = context_->model();
  const int k = model.latent_dim();
  Eigen::MatrixXd a = hp.lambda_u * Eigen::MatrixXd::Identity(k, k);
  Vector b = Vector::Zero(k);
  if (has_history_) {
    const auto triples = context_->ratings().triples();
    for (auto t : context_->ratings().user_entries(*user_)) {
      const auto& r = triples[t];
      Vector vp = pweighted(model.p, V_.row(r.item));
      a.noalias() += vp * vp.transpose();
      b += r.value * vp;
    }
  }
  if (hp.gamma != 0.0) {
    for (Eigen::Index j = 0; j < V_.rows(); ++j) {
      Vector vq = pweighted(model.q, V_.row(j));
      a.noalias() += hp.gamma * vq * vq.transpose();
      b += hp.gamma * affinity[static_cast<std::size_t>(j)] * vq;
    }
  }
  set_user_factor(detail::solve_spd(a, b));
}

void OnlineFactors::update_items(std::span<const double> affinity, const HyperParams& hp) {
  const auto& model = context_->model();
  const int k = model.latent_dim();
  Vector uq = u_.cwiseProduct(model.q);
  Eigen::MatrixXd base = hp.lambda_v * Eigen::MatrixXd::Identity(k, k) + hp.gamma * uq * uq.transpose();
  for (Eigen::Index j = 0; j < V_.rows(); ++j) {
    Eigen::MatrixXd a = base;
    a += Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        grams_.grams.row(j).data(), k, k);
    Vector b = grams_.rhs.row(j).transpose() + hp.gamma * affinity[static_cast<std::size_t>(j)] * uq;
    V_.row(j) = detail::solve_spd(a, b).transpose();
  }
}

void OnlineFactors::sweep(std::span<const double> affinity, const HyperParams& hp, int sweeps) {
  for (int s = 0; s < sweeps; ++s) {
    update_user(affinity, hp);
    update_items(affinity, hp);
  }
}

std::vector<double> OnlineFactors::scores() const {
  Vector pu = u_.cwiseProduct(context_->model().p);
  Vector s = V_ * pu;
  return std::vector<double>(s.data(), s.data() + s.size());
}

ItemGramCache OnlineFactors::recompute_grams() const {
  LatentModel snapshot = context_->model();
  if (user_) snapshot.U.row(static_cast<Eigen::Index>(*user_)) = u_.transpose();
  return ItemGramCache::build(snapshot, context_->ratings());
}

std::string_view to_string(SessionStatus status) {
  switch (status) {
    case SessionStatus::active: return "active";
    case SessionStatus::stopped: return "stopped";
    case SessionStatus::exhausted: return "exhausted";
  }
  return "?";
}

Session::Session(std::shared_ptr<const SessionContext> context, std::optional<std::size_t> user,
                 SessionOptions options)
    : context_(std::move(context)),
      user_(user),
      options_(std::move(options)),
      factors_(*context_, user),
      candidates_(CandidateSet::all(context_->corpus().num_items())),
      pool_(context_->corpus().num_entities()),
      rng_(options_.seed) {
  options_.hp.validate();
  const std::size_t m = context_->corpus().num_items();
  affinity_.assign(m, 0);
  affinity_real_.assign(m, 0.0);
  refresh_ranking();
  alpha_ = options_.prior == PriorKind::uniform ? uniform_alpha(m) : init_alpha(ranking_);
}

void Session::refresh_ranking() {
  scores_ = factors_.scores();
  ranking_ = rank_by_scores(scores_);
}

std::vector<double> Session::preferences() const { return preference_mean(alpha_, affinity_); }

std::optional<Question> Session::next_question(bool force) {
  if (status_ != SessionStatus::active) {
    throw Error(ErrorCode::state, "session is " + std::string(to_string(status_)));
  }
  const auto& corpus = context_->corpus();
  if (pending_) return Question{*pending_, render_question(corpus.entity(*pending_))};
  if (candidates_.size() <= 1 && !force) return std::nullopt;
  if (pool_.empty()) {
    status_ = SessionStatus::exhausted;
    return std::nullopt;
  }
  std::size_t entity = 0;
  if (options_.policy == QuestionPolicy::random) {
    auto available = pool_.available();
    std::uniform_int_distribution<std::size_t> pick(0, available.size() - 1);
    entity = available[pick(rng_)];
  } else {
    entity = select_question(preferences(), candidates_, pool_, corpus);
  }
  pool_.take(entity);
  pending_ = entity;
  return Question{entity, render_question(corpus.entity(entity))};
}

void Session::apply_answer(std::size_t entity, Answer answer) {
  if (status_ != SessionStatus::active) {
    throw Error(ErrorCode::state, "session is " + std::string(to_string(status_)));
  }
  if (!pending_ || *pending_ != entity) {
    throw Error(ErrorCode::protocol,
                "answer for entity " + std::to_string(entity) + " which is not the pending question");
  }
  pending_.reset();
  AskedQuestion record{entity, answer, {}, 0, false};
  if (answer != Answer::not_sure) {
    const auto& corpus = context_->corpus();
    const bool bit = answer == Answer::yes;
    record.indicator.resize(corpus.num_items());
    for (std::size_t d = 0; d < corpus.num_items(); ++d) {
      std::uint8_t y = corpus.contains(d, entity) == bit ? 1 : 0;
      record.indicator[d] = y;
      affinity_[d] += y;
      affinity_real_[d] = static_cast<double>(affinity_[d]);
    }
    auto pruned = prune_candidates(candidates_, entity, answer, corpus);
    candidates_ = std::move(pruned.candidates);
    record.contradiction = pruned.contradiction;
    contradiction_ = contradiction_ || pruned.contradiction;
    factors_.sweep(affinity_real_, options_.hp, options_.hp.als_sweeps);
    refresh_ranking();
  }
  record.candidates_after = candidates_.size();
  asked_.push_back(std::move(record));
}

void Session::stop() {
  if (status_ == SessionStatus::active) status_ = SessionStatus::stopped;
  pending_.reset();
}

std::vector<Recommendation> Session::recommendations(std::size_t k) const {
  if (k == 0) throw Error(ErrorCode::invalid_argument, "k must be at least 1");
  k = std::min(k, ranking_.size());
  std::vector<Recommendation> out;
  out.reserve(k);
  for (std::size_t r = 0; r < k; ++r) out.push_back({ranking_[r], scores_[ranking_[r]], r + 1});
  return out;
}

std::size_t Session::rank_of(std::uint32_t item) const {
  auto it = std::find(ranking_.begin(), ranking_.end(), item);
  if (it == ranking_.end()) throw Error(ErrorCode::invalid_argument, "item not in ranking");
  return static_cast<std::size_t>(it - ranking_.begin()) + 1;
}

Answer simulated_answer(const ItemCorpus& corpus, std::size_t target, std::size_t entity) {
  if (target >= corpus.num_items() || entity >= corpus.num_entities()) {
    throw Error(ErrorCode::invalid_argument, "simulated answer index out of range");
  }
  return corpus.contains(target, entity) ? Answer::yes : Answer::no;
}

std::size_t Trajectory::target_rank_at(std::size_t nq) const {
  if (steps.empty() || nq == 0) return initial_target_rank;
  return steps[std::min(nq, steps.size()) - 1].target_rank;
}

Trajectory run_session(std::shared_ptr<const SessionContext> context,
                       std::optional<std::size_t> user, std::size_t target, std::size_t nq,
                       const SessionOptions& options, bool keep_rankings) {
  const auto& corpus = context->corpus();
  if (target >= corpus.num_items()) throw Error(ErrorCode::invalid_argument, "target out of range");
  Session session(context, user, options);
  Trajectory traj;
  auto tgt = static_cast<std::uint32_t>(target);
  traj.initial_target_rank = session.rank_of(tgt);
  if (keep_rankings) traj.rankings.emplace_back(session.ranking().begin(), session.ranking().end());

  while (session.questions_asked() < nq) {
    auto question = session.next_question();
    if (!question) break;
    auto answer = simulated_answer(corpus, target, question->entity);
    session.apply_answer(question->entity, answer);
    traj.steps.push_back({session.questions_asked(), question->entity, answer,
                          session.candidates().size(), session.rank_of(tgt)});
    if (keep_rankings) traj.rankings.emplace_back(session.ranking().begin(), session.ranking().end());
  }
  traj.contradiction = session.contradiction();
  return traj;
}

std::string format_trajectory_line(std::string_view session_id, const TrajectoryStep& step,
                                   const ItemCorpus& corpus) {
  std::string out = "session=";
  out += session_id;
  out += "\tl=" + std::to_string(step.l);
  out += "\tentity=" + corpus.entity(step.entity);
  out += "\tanswer=";
  out += to_string(step.answer);
  out += "\tcandidates=" + std::to_string(step.candidates);
  out += "\ttarget_rank=" + std::to_string(step.target_rank);
  return out;
}

}  // namespace qrec
