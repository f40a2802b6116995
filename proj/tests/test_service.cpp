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

#include "qrec/service.hpp"
#include "qrec/synthetic.hpp"

#include <doctest.h>
#include <httplib.h>
#include <json.hpp>

#include <atomic>
#include <thread>

using namespace qrec;
using json = nlohmann::json;

namespace {

struct Fixture {
  std::shared_ptr<const Dataset> dataset;
  std::shared_ptr<const SessionContext> context;
};

const Fixture& fixture() {
  static Fixture f = [] {
    SyntheticConfig c;
    c.users = 40;
    c.items = 30;
    c.entities = 60;
    c.held_out_users = 0;
    auto ds = std::make_shared<Dataset>(generate_benchmark(c).dataset);
    auto train = std::make_shared<RatingMatrix>(ds->matrix(ds->ratings));
    auto model = std::make_shared<LatentModel>(train_offline(*train, HyperParams{}));
    return Fixture{ds, std::make_shared<SessionContext>(ds->corpus, train, model)};
  }();
  return f;
}

struct ManualClock {
  std::chrono::steady_clock::time_point now{};
  SessionService::Clock fn() {
    return [this] { return now; };
  }
};

SessionService make_service(ServiceConfig config = {}, SessionService::Clock clock = {}) {
  config.seed = 5;
  return SessionService(fixture().dataset, fixture().context, config, std::move(clock));
}

json body(const ServiceResponse& r) { return json::parse(r.body); }

ServiceResponse post(SessionService& s, const std::string& path, const json& b) {
  return s.handle({"POST", path, {}, b.dump()});
}

std::string create(SessionService& s, const json& request = json::object()) {
  auto r = post(s, "/api/sessions", request);
  REQUIRE(r.status == 201);
  return body(r)["session_id"].get<std::string>();
}

}  // namespace

TEST_CASE("create returns a question and the initial grid") {
  auto s = make_service();
  auto r = post(s, "/api/sessions", {{"mode", "study"}, {"target_item", "I0003"}, {"user_id", "U00001"}});
  REQUIRE(r.status == 201);
  auto b = body(r);
  CHECK(b["questions_asked"] == 0);
  CHECK(b["question"]["text"] ==
        "Are you seeking for a [" + b["question"]["entity"].get<std::string>() + "] related item?");
  CHECK(b["top_items"].size() == 16);
  CHECK(b["top_items"][0]["rank"] == 1);
  CHECK(b["target_item"] == "I0003");

  auto first = create(s);
  auto second = create(s);
  CHECK(first != second);
}

TEST_CASE("create validation") {
  auto s = make_service();
  CHECK(post(s, "/api/sessions", {{"mode", "study"}}).status == 400);
  CHECK(post(s, "/api/sessions", {{"mode", "chat"}}).status == 400);
  CHECK(post(s, "/api/sessions", {{"gamma", -1}}).status == 400);
  CHECK(post(s, "/api/sessions", {{"user_id", "nobody"}}).status == 404);
  CHECK(post(s, "/api/sessions", {{"mode", "study"}, {"target_item", "nothing"}}).status == 404);
  CHECK(s.handle({"POST", "/api/sessions", {}, "{not json"}).status == 400);
  auto err = body(post(s, "/api/sessions", {{"mode", "chat"}}));
  CHECK(err.contains("error"));
  CHECK(err.contains("detail"));
}

TEST_CASE("cold interactive sessions start from the identity order") {
  auto s = make_service();
  auto b = body(post(s, "/api/sessions", json::object()));
  CHECK(b["top_items"][0]["item_id"] == "I0000");
  CHECK(b["top_items"][15]["item_id"] == "I0015");
}

TEST_CASE("answering advances the session") {
  auto s = make_service();
  auto id = create(s, {{"user_id", "U00002"}});
  auto r = post(s, "/api/sessions/" + id + "/answer", {{"answer", "yes"}});
  REQUIRE(r.status == 200);
  CHECK(body(r)["questions_asked"] == 1);
  CHECK(post(s, "/api/sessions/" + id + "/answer", {{"answer", "perhaps"}}).status == 400);
  CHECK(post(s, "/api/sessions/" + id + "/answer", json::object()).status == 400);
  CHECK(post(s, "/api/sessions/unknown/answer", {{"answer", "yes"}}).status == 404);
}

TEST_CASE("stale answers conflict") {
  auto s = make_service();
  auto id = create(s);
  auto path = "/api/sessions/" + id + "/answer";
  CHECK(post(s, path, {{"answer", "no"}, {"questions_asked", 0}}).status == 200);
  auto late = post(s, path, {{"answer", "no"}, {"questions_asked", 0}});
  CHECK(late.status == 409);
}

TEST_CASE("the question cap ends the session") {
  auto s = make_service();
  auto id = create(s);
  json last;
  for (int n = 0; n < 20; ++n) {
    auto r = post(s, "/api/sessions/" + id + "/answer", {{"answer", "not_sure"}});
    REQUIRE(r.status == 200);
    last = body(r);
  }
  CHECK(last["questions_asked"] == 20);
  CHECK(last["done"] == true);
  CHECK(last["question"].is_null());
  CHECK(post(s, "/api/sessions/" + id + "/answer", {{"answer", "yes"}}).status == 409);
}

TEST_CASE("recommendations are pure reads") {
  auto s = make_service();
  auto id = create(s, {{"user_id", "U00004"}});
  auto path = "/api/sessions/" + id + "/recommendations";
  auto a = s.handle({"GET", path, {}, ""});
  auto b = s.handle({"GET", path, {}, ""});
  REQUIRE(a.status == 200);
  CHECK(a.body == b.body);
  CHECK(body(a)["items"].size() == 16);
  CHECK(body(s.handle({"GET", path, {{"k", "30"}}, ""}))["items"].size() == 30);
  CHECK(body(s.handle({"GET", path, {{"k", "100"}}, ""}))["items"].size() == 30);
  CHECK(s.handle({"GET", path, {{"k", "0"}}, ""}).status == 400);
  CHECK(s.handle({"GET", path, {{"k", "x"}}, ""}).status == 400);
  CHECK(s.handle({"GET", "/api/sessions/nope/recommendations", {}, ""}).status == 404);
}

TEST_CASE("stop is idempotent and freezes the list") {
  auto s = make_service();
  auto id = create(s, {{"mode", "study"}, {"target_item", "I0007"}, {"user_id", "U00003"}});
  auto fresh = body(s.handle({"GET", "/api/sessions/" + id + "/recommendations", {}, ""}));
  auto first = post(s, "/api/sessions/" + id + "/stop", json::object());
  auto second = post(s, "/api/sessions/" + id + "/stop", json::object());
  REQUIRE(first.status == 200);
  CHECK(first.body == second.body);
  auto summary = body(first);
  CHECK(summary["questions_asked"] == 0);
  CHECK(summary["final_top_k"] == fresh["items"]);
  CHECK(summary["target_rank"].get<int>() >= 1);
  CHECK(post(s, "/api/sessions/" + id + "/answer", {{"answer", "yes"}}).status == 409);
  CHECK(s.handle({"GET", "/api/sessions/" + id + "/recommendations", {}, ""}).status == 200);
  CHECK(post(s, "/api/sessions/missing/stop", json::object()).status == 404);
}

TEST_CASE("study mode reports the target's final rank") {
  auto s = make_service();
  const auto& corpus = fixture().context->corpus();
  auto target = *corpus.find_item("I0011");
  json state = body(post(s, "/api/sessions", {{"mode", "study"}, {"target_item", "I0011"}}));
  auto id = state["session_id"].get<std::string>();
  while (!state["done"].get<bool>()) {
    auto entity = *corpus.find_entity(state["question"]["entity"].get<std::string>());
    auto answer = corpus.contains(target, entity) ? "yes" : "no";
    state = body(post(s, "/api/sessions/" + id + "/answer", {{"answer", answer}}));
  }
  auto summary = body(post(s, "/api/sessions/" + id + "/stop", json::object()));
  CHECK(summary["target_item"] == "I0011");
  auto all = body(s.handle({"GET", "/api/sessions/" + id + "/recommendations", {{"k", "30"}}, ""}));
  int rank = 0;
  for (const auto& row : all["items"])
    if (row["item_id"] == "I0011") rank = row["rank"].get<int>();
  CHECK(summary["target_rank"] == rank);
}

TEST_CASE("idle sessions expire") {
  ManualClock clock;
  ServiceConfig config;
  config.ttl = std::chrono::seconds(60);
  auto s = make_service(config, clock.fn());
  auto id = create(s);
  clock.now += std::chrono::seconds(59);
  CHECK(s.handle({"GET", "/api/sessions/" + id + "/recommendations", {}, ""}).status == 200);
  clock.now += std::chrono::seconds(59);  // activity above reset the idle timer
  CHECK(s.session_count() == 1);
  CHECK(s.handle({"GET", "/api/sessions/" + id + "/recommendations", {}, ""}).status == 200);
  clock.now += std::chrono::seconds(61);
  CHECK(s.handle({"GET", "/api/sessions/" + id + "/recommendations", {}, ""}).status == 404);
  create(s);
  clock.now += std::chrono::seconds(120);
  CHECK(s.evict_expired() == 1);
  CHECK(s.session_count() == 0);
}

TEST_CASE("items, health and routing") {
  auto s = make_service();
  auto item = s.handle({"GET", "/api/items/I0002", {}, ""});
  REQUIRE(item.status == 200);
  CHECK(body(item)["index"] == 2);
  CHECK(!body(item)["entities"].empty());
  CHECK(s.handle({"GET", "/api/items/none", {}, ""}).status == 404);
  auto health = body(s.handle({"GET", "/api/health", {}, ""}));
  CHECK(health["status"] == "ok");
  CHECK(health["items"] == 30);
  CHECK(s.handle({"DELETE", "/api/health", {}, ""}).status == 405);
  CHECK(s.handle({"GET", "/api/sessions", {}, ""}).status == 405);
  CHECK(s.handle({"GET", "/nowhere", {}, ""}).status == 404);
  CHECK(s.handle({"OPTIONS", "/api/sessions", {}, ""}).status == 204);
}

TEST_CASE("sessions are isolated") {
  auto s = make_service();
  auto a = create(s, {{"user_id", "U00001"}});
  auto b = create(s, {{"user_id", "U00001"}});
  auto before = s.handle({"GET", "/api/sessions/" + b + "/recommendations", {}, ""}).body;
  for (int n = 0; n < 3; ++n) post(s, "/api/sessions/" + a + "/answer", {{"answer", "yes"}});
  CHECK(s.handle({"GET", "/api/sessions/" + b + "/recommendations", {}, ""}).body == before);
}

TEST_CASE("concurrent answers to one session: exactly one wins") {
  auto s = make_service();
  auto id = create(s);
  std::atomic<int> ok{0}, conflict{0};
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&] {
      auto r = post(s, "/api/sessions/" + id + "/answer", {{"answer", "no"}, {"questions_asked", 0}});
      (r.status == 200 ? ok : conflict)++;
    });
  }
  for (auto& t : threads) t.join();
  CHECK(ok == 1);
  CHECK(conflict == 3);
}

TEST_CASE("HTTP front end over a real socket") {
  ServiceConfig config;
  config.seed = 9;
  config.cors_origin = "http://localhost:5173";
  auto service = std::make_shared<SessionService>(fixture().dataset, fixture().context, config);
  HttpServer server(service);
  server.start("127.0.0.1", 0);
  REQUIRE(server.port() > 0);

  httplib::Client client("127.0.0.1", server.port());
  auto health = client.Get("/api/health");
  REQUIRE(health);
  CHECK(health->status == 200);
  CHECK(health->get_header_value("Access-Control-Allow-Origin") == "http://localhost:5173");

  auto created = client.Post("/api/sessions", R"({"user_id": "U00001"})", "application/json");
  REQUIRE(created);
  CHECK(created->status == 201);
  auto id = json::parse(created->body)["session_id"].get<std::string>();
  auto answered = client.Post("/api/sessions/" + id + "/answer", R"({"answer": "yes"})",
                              "application/json");
  REQUIRE(answered);
  CHECK(json::parse(answered->body)["questions_asked"] == 1);
  auto recs = client.Get("/api/sessions/" + id + "/recommendations?k=4");
  REQUIRE(recs);
  CHECK(json::parse(recs->body)["items"].size() == 4);
  auto preflight = client.Options("/api/sessions");
  REQUIRE(preflight);
  CHECK(preflight->status == 204);
  CHECK(client.Get("/api/sessions/zzz/recommendations")->status == 404);

  HttpServer clash(service);
  CHECK_THROWS_AS(clash.start("127.0.0.1", server.port()), Error);
  server.stop();
}
