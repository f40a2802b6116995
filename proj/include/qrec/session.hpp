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

#include "qrec/belief.hpp"
#include "qrec/corpus.hpp"
#include "qrec/factorization.hpp"
#include "qrec/ratings.hpp"

#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace qrec {

// Per-item rating Grams sum_{i in obs(j)} (p o u_i)(p o u_i)^T and responses
// sum_{i in obs(j)} R_ij (p o u_i), from a fixed model.
struct ItemGramCache {
  Matrix grams;  // M x K*K, row-major K x K blocks
  Matrix rhs;    // M x K

  static ItemGramCache build(const LatentModel& model, const RatingMatrix& ratings);
};

// Immutable inputs shared by every session over one model.
class SessionContext {
 public:
  SessionContext(std::shared_ptr<const ItemCorpus> corpus,
                 std::shared_ptr<const RatingMatrix> ratings,
                 std::shared_ptr<const LatentModel> model);

  const ItemCorpus& corpus() const { return *corpus_; }
  const RatingMatrix& ratings() const { return *ratings_; }
  const LatentModel& model() const { return *model_; }
  const ItemGramCache& item_grams() const { return grams_; }

 private:
  std::shared_ptr<const ItemCorpus> corpus_;
  std::shared_ptr<const RatingMatrix> ratings_;
  std::shared_ptr<const LatentModel> model_;
  ItemGramCache grams_;
};

// Session-local copy of u_i and V with the closed-form online updates. Other
// users' factors stay frozen; the item Grams are patched with a rank-1 delta
// whenever u_i changes.
class OnlineFactors {
 public:
  // With no user, or a user without training ratings, u_i starts at zero.
  OnlineFactors(const SessionContext& context, std::optional<std::size_t> user);

  void update_user(std::span<const double> affinity, const HyperParams& hp);
  void update_items(std::span<const double> affinity, const HyperParams& hp);
  void sweep(std::span<const double> affinity, const HyperParams& hp, int sweeps);

  std::vector<double> scores() const;
  const Vector& user_factor() const { return u_; }
  const Matrix& item_factors() const { return V_; }
  const ItemGramCache& grams() const { return grams_; }

  // Rebuilds the Grams from the ratings instead of patching.
  ItemGramCache recompute_grams() const;

 private:
  void set_user_factor(const Vector& u);

  const SessionContext* context_;
  std::optional<std::size_t> user_;
  bool has_history_ = false;
  Vector u_;
  Matrix V_;
  ItemGramCache grams_;
};

enum class SessionStatus { active, stopped, exhausted };
enum class QuestionPolicy { gbs, random };
enum class PriorKind { ranked, uniform };

std::string_view to_string(SessionStatus status);

struct SessionOptions {
  HyperParams hp;  // gamma, lambda_u/v and als_sweeps are used online
  QuestionPolicy policy = QuestionPolicy::gbs;
  PriorKind prior = PriorKind::ranked;
  std::uint64_t seed = 0;  // random question policy only
};

struct Question {
  std::size_t entity = 0;
  std::string text;
};

struct AskedQuestion {
  std::size_t entity = 0;
  Answer answer = Answer::not_sure;
  std::vector<std::uint8_t> indicator;  // y_l; empty for not_sure
  std::size_t candidates_after = 0;
  bool contradiction = false;
};

struct Recommendation {
  std::uint32_t item = 0;
  double score = 0.0;
  std::size_t rank = 0;  // 1-based
};

// One user's elicitation episode: issue a question, take the answer, update
// affinity, candidates and factors, re-rank.
class Session {
 public:
  Session(std::shared_ptr<const SessionContext> context, std::optional<std::size_t> user,
          SessionOptions options);

  // Issues the next question and removes it from the pool. Returns nullopt
  // when one candidate is left (unless `force`), or when the pool is empty,
  // which also marks the session exhausted. A pending unanswered question is
  // returned again.
  std::optional<Question> next_question(bool force = false);

  // Incorporates the answer to the pending question. Throws protocol when
  // `entity` is not the pending question, state when the session is over.
  void apply_answer(std::size_t entity, Answer answer);

  void stop();

  std::vector<Recommendation> recommendations(std::size_t k) const;
  std::span<const std::uint32_t> ranking() const { return ranking_; }
  std::size_t rank_of(std::uint32_t item) const;  // 1-based

  std::vector<double> preferences() const;

  std::size_t questions_asked() const { return asked_.size(); }
  SessionStatus status() const { return status_; }
  std::optional<std::size_t> user() const { return user_; }
  std::optional<std::size_t> pending() const { return pending_; }
  bool contradiction() const { return contradiction_; }

  std::span<const int> affinity() const { return affinity_; }
  std::span<const double> alpha() const { return alpha_; }
  const CandidateSet& candidates() const { return candidates_; }
  const QuestionPool& pool() const { return pool_; }
  std::span<const AskedQuestion> asked() const { return asked_; }
  const OnlineFactors& factors() const { return factors_; }
  const SessionContext& context() const { return *context_; }

 private:
  void refresh_ranking();

  std::shared_ptr<const SessionContext> context_;
  std::optional<std::size_t> user_;
  SessionOptions options_;
  OnlineFactors factors_;
  std::vector<double> alpha_;
  std::vector<int> affinity_;
  std::vector<double> affinity_real_;
  CandidateSet candidates_;
  QuestionPool pool_;
  std::vector<AskedQuestion> asked_;
  std::vector<std::uint32_t> ranking_;
  std::vector<double> scores_;
  std::optional<std::size_t> pending_;
  SessionStatus status_ = SessionStatus::active;
  bool contradiction_ = false;
  std::mt19937_64 rng_;
};

// Truthful user: yes iff the target item contains the entity.
Answer simulated_answer(const ItemCorpus& corpus, std::size_t target, std::size_t entity);

struct TrajectoryStep {
  std::size_t l = 0;  // questions asked after this step
  std::size_t entity = 0;
  Answer answer = Answer::no;
  std::size_t candidates = 0;
  std::size_t target_rank = 0;  // 1-based
};

struct Trajectory {
  // rankings[l] is the recommendation after l questions; rankings[0] is the
  // offline ranking.
  std::vector<std::vector<std::uint32_t>> rankings;
  std::vector<TrajectoryStep> steps;
  std::size_t initial_target_rank = 0;
  bool contradiction = false;

  // Target rank after min(nq, questions asked) questions.
  std::size_t target_rank_at(std::size_t nq) const;
};

// Full elicitation loop with a simulated user: stops at nq questions, a
// single candidate, or an empty pool.
Trajectory run_session(std::shared_ptr<const SessionContext> context,
                       std::optional<std::size_t> user, std::size_t target, std::size_t nq,
                       const SessionOptions& options, bool keep_rankings = true);

// "session=<id>\tl=<l>\tentity=<name>\tanswer=<a>\tcandidates=<n>\ttarget_rank=<r>"
std::string format_trajectory_line(std::string_view session_id, const TrajectoryStep& step,
                                   const ItemCorpus& corpus);

}  // namespace qrec
