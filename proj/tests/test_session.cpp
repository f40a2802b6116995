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

#include "fixtures.hpp"

#include "qrec/checkpoint.hpp"
#include "qrec/synthetic.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace qrec;

namespace {

std::shared_ptr<SessionContext> context_for(const Dataset& ds, const HyperParams& hp = {}) {
  auto train = std::make_shared<RatingMatrix>(ds.matrix(ds.ratings));
  auto model = std::make_shared<LatentModel>(train_offline(*train, hp));
  return std::make_shared<SessionContext>(ds.corpus, train, model);
}

std::shared_ptr<SessionContext> small_benchmark() {
  SyntheticConfig c;
  c.users = 40;
  c.items = 40;
  c.entities = 60;
  c.held_out_users = 0;
  static auto ctx = context_for(generate_benchmark(c).dataset);
  return ctx;
}

SessionOptions uniform_prior() {
  SessionOptions o;
  o.prior = PriorKind::uniform;
  return o;
}

}  // namespace

TEST_CASE("cold session starts from zero factors and identity order") {
  auto ctx = qrec::testing::toy_context();
  Session s(ctx, std::nullopt, {});
  CHECK(s.factors().user_factor().isZero(0.0));
  std::vector<std::uint32_t> identity = {0, 1, 2, 3};
  CHECK(std::vector<std::uint32_t>(s.ranking().begin(), s.ranking().end()) == identity);
  CHECK(std::vector<double>(s.alpha().begin(), s.alpha().end()) == init_alpha(identity));

  // User 5 has no training ratings: same as cold.
  Session unrated(ctx, 5, {});
  CHECK(unrated.factors().user_factor().isZero(0.0));
}

TEST_CASE("warm session starts from the offline ranking") {
  auto ctx = qrec::testing::toy_context();
  Session s(ctx, 0, {});
  auto offline = rank_items(ctx->model(), 0);
  CHECK(std::vector<std::uint32_t>(s.ranking().begin(), s.ranking().end()) == offline);
  CHECK(s.alpha()[offline[0]] == 1.0);
  auto top = s.recommendations(2);
  REQUIRE(top.size() == 2);
  CHECK(top[0].item == offline[0]);
  CHECK(top[1].rank == 2);
  CHECK(s.recommendations(100).size() == 4);
}

TEST_CASE("sessions never touch shared state") {
  auto ctx = small_benchmark();
  Checkpoint before{ctx->model(), {}, 0, {}};
  auto model_text = serialize_checkpoint(before);
  Matrix grams = ctx->item_grams().grams;
  for (int n = 0; n < 100; ++n) {
    Session s(ctx, static_cast<std::size_t>(n % 40), {});
    for (int l = 0; l < 3; ++l) {
      auto q = s.next_question();
      if (!q) break;
      s.apply_answer(q->entity, simulated_answer(ctx->corpus(), static_cast<std::size_t>(n) % ctx->corpus().num_items(), q->entity));
    }
  }
  CHECK(serialize_checkpoint(Checkpoint{ctx->model(), {}, 0, {}}) == model_text);
  CHECK(ctx->item_grams().grams == grams);
}

TEST_CASE("first question on the toy corpus") {
  auto ctx = qrec::testing::toy_context();
  Session s(ctx, std::nullopt, uniform_prior());
  auto q = s.next_question();
  REQUIRE(q);
  CHECK(q->entity == *ctx->corpus().find_entity("a"));
  CHECK(q->text == "Are you seeking for a [a] related item?");
  // Unanswered: the same question comes back.
  CHECK(s.next_question()->entity == q->entity);
}

TEST_CASE("answers add the indicator vector to the affinity row") {
  auto corpus = qrec::testing::make_corpus({{"d"}, {}, {"d"}, {}});
  auto ratings = std::make_shared<RatingMatrix>(2, 4, std::vector<Rating>{{0, 1, 4}});
  auto model = std::make_shared<LatentModel>(train_offline(*ratings, HyperParams{}));
  auto ctx = std::make_shared<SessionContext>(corpus, ratings, model);

  Session yes(ctx, 0, uniform_prior());
  yes.apply_answer(yes.next_question()->entity, Answer::yes);
  CHECK(std::vector<int>(yes.affinity().begin(), yes.affinity().end()) == std::vector<int>{1, 0, 1, 0});
  CHECK(yes.asked()[0].indicator == std::vector<std::uint8_t>{1, 0, 1, 0});
  CHECK(yes.candidates() == CandidateSet({0, 2}));

  Session no(ctx, 0, uniform_prior());
  no.apply_answer(no.next_question()->entity, Answer::no);
  CHECK(std::vector<int>(no.affinity().begin(), no.affinity().end()) == std::vector<int>{0, 1, 0, 1});
}

TEST_CASE("not sure changes nothing but the question count") {
  auto ctx = qrec::testing::toy_context();
  Session s(ctx, 0, {});
  std::vector<std::uint32_t> before(s.ranking().begin(), s.ranking().end());
  auto q = s.next_question();
  s.apply_answer(q->entity, Answer::not_sure);
  CHECK(s.questions_asked() == 1);
  CHECK(std::vector<std::uint32_t>(s.ranking().begin(), s.ranking().end()) == before);
  CHECK(std::all_of(s.affinity().begin(), s.affinity().end(), [](int y) { return y == 0; }));
  CHECK(s.candidates().size() == 4);
  CHECK(s.next_question()->entity != q->entity);
}

TEST_CASE("truthful answers keep the target on top of the affinity row") {
  auto ctx = small_benchmark();
  for (std::size_t target : {3u, 17u, 29u}) {
    Session s(ctx, target, {});
    for (int l = 1; l <= 5; ++l) {
      auto q = s.next_question(true);
      REQUIRE(q);
      s.apply_answer(q->entity, simulated_answer(ctx->corpus(), target, q->entity));
    }
    auto y = s.affinity();
    CHECK(y[target] == 5);
    CHECK(*std::max_element(y.begin(), y.end()) == 5);
    CHECK(s.candidates().contains(static_cast<std::uint32_t>(target)));
  }
}

TEST_CASE("the loop stops once one candidate is left") {
  auto ctx = qrec::testing::toy_context();
  Session s(ctx, std::nullopt, uniform_prior());
  std::size_t target = 3;
  while (auto q = s.next_question()) {
    s.apply_answer(q->entity, simulated_answer(ctx->corpus(), target, q->entity));
  }
  CHECK(s.candidates() == CandidateSet({3}));
  CHECK(s.status() == SessionStatus::active);
}

TEST_CASE("protocol and state errors") {
  auto ctx = qrec::testing::toy_context();
  Session s(ctx, 0, {});
  auto q = s.next_question();
  try {
    s.apply_answer(q->entity + 1, Answer::yes);
    FAIL("expected protocol error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::protocol);
  }
  s.stop();
  CHECK(s.status() == SessionStatus::stopped);
  try {
    s.apply_answer(q->entity, Answer::yes);
    FAIL("expected state error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::state);
  }
  CHECK(s.recommendations(4).size() == 4);
  CHECK_THROWS_AS(s.recommendations(0), Error);
}

TEST_CASE("simulated user") {
  auto corpus = qrec::testing::make_corpus({{"cotton", "towel"}, {"steel"}});
  auto cotton = *corpus->find_entity("cotton");
  CHECK(simulated_answer(*corpus, 0, cotton) == Answer::yes);
  CHECK(simulated_answer(*corpus, 1, cotton) == Answer::no);
}

TEST_CASE("zero questions keep the offline ranking") {
  auto ctx = small_benchmark();
  auto t = run_session(ctx, std::size_t{4}, 9, 0, {});
  CHECK(t.steps.empty());
  REQUIRE(t.rankings.size() == 1);
  CHECK(t.rankings[0] == rank_items(ctx->model(), 4));
}

TEST_CASE("replaying a session gives the same trajectory") {
  auto ctx = small_benchmark();
  for (auto policy : {QuestionPolicy::gbs, QuestionPolicy::random}) {
    SessionOptions o;
    o.policy = policy;
    o.seed = 99;
    auto a = run_session(ctx, std::size_t{2}, 11, 8, o);
    auto b = run_session(ctx, std::size_t{2}, 11, 8, o);
    CHECK(a.rankings == b.rankings);
    REQUIRE(a.steps.size() == b.steps.size());
    for (std::size_t l = 0; l < a.steps.size(); ++l) CHECK(a.steps[l].entity == b.steps[l].entity);
  }
}

TEST_CASE("binary code: bit entities come before redundant ones") {
  auto ds = binary_code_dataset(64, true);
  auto ctx = context_for(ds);
  for (std::size_t target = 0; target < 64; ++target) {
    Session s(ctx, std::nullopt, uniform_prior());
    std::vector<std::size_t> asked;
    while (auto q = s.next_question()) {
      asked.push_back(q->entity);
      s.apply_answer(q->entity, simulated_answer(ctx->corpus(), target, q->entity));
    }
    REQUIRE(asked.size() == 6);
    for (auto e : asked) CHECK(ctx->corpus().entity(e).rfind("bit ", 0) == 0);
    CHECK(s.candidates() == CandidateSet({static_cast<std::uint32_t>(target)}));
  }
}

TEST_CASE("trajectory line format") {
  auto corpus = qrec::testing::make_corpus({{"cotton"}});
  TrajectoryStep step{2, 0, Answer::yes, 5, 1};
  CHECK(format_trajectory_line("s1", step, *corpus) ==
        "session=s1\tl=2\tentity=cotton\tanswer=yes\tcandidates=5\ttarget_rank=1");
}
