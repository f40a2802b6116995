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

#include <doctest.h>

#include <set>

using namespace qrec;
using qrec::testing::TempDir;

namespace {

std::vector<ScoredEntity> half(std::initializer_list<const char*> phrases) {
  std::vector<ScoredEntity> out;
  for (const char* p : phrases) out.push_back({p, 0.5});
  return out;
}

std::vector<ScoredEntity> concat(std::vector<ScoredEntity> a, const std::vector<ScoredEntity>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TEST_CASE("ingest keeps entities at or above the threshold") {
  TempDir dir;
  auto items = dir.write("items.tsv",
                         "A\tTowel\tsoft cotton towel\nB\tPan\tsteel pan\nC\tMug\tceramic mug\n");
  auto entities = dir.write("entities.tsv",
                            "A\tcotton\t0.9\nA\ttowel\t0.4\nB\tsteel\t0.7\nB\tnonstick\t0.05\n"
                            "C\tCotton\t0.2\n");
  auto corpus = ingest_corpus(items, entities, 0.1);
  REQUIRE(corpus.num_items() == 3);
  CHECK(corpus.num_entities() == 3);
  auto a = *corpus.find_item("A");
  std::set<std::string> row_a;
  for (auto e : corpus.entities_of(a)) row_a.insert(corpus.entity(e));
  CHECK(row_a == std::set<std::string>{"cotton", "towel"});
  CHECK_FALSE(corpus.find_entity("nonstick").has_value());
  // Case folding merges "Cotton" into the existing entry.
  CHECK(corpus.contains(*corpus.find_item("C"), *corpus.find_entity("cotton")));
}

TEST_CASE("ingest rejects unknown item ids and malformed rows") {
  TempDir dir;
  auto items = dir.write("items.tsv", "A\tTowel\tdoc\n");
  auto unknown = dir.write("e1.tsv", "Z\tcotton\t0.9\n");
  CHECK_THROWS_AS(ingest_corpus(items, unknown), Error);
  auto bad_items = dir.write("i2.tsv", "A\tTowel\tdoc\nB only one field\n");
  auto ok = dir.write("e2.tsv", "A\tcotton\t0.9\n");
  try {
    ingest_corpus(bad_items, ok);
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::parse);
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }
}

TEST_CASE("vocabulary has no case-folded duplicates") {
  auto corpus = qrec::testing::make_corpus({{"Cotton", "cotton ", "TOWEL"}, {"towel", "glass"}});
  CHECK(corpus->num_entities() == 3);
  std::set<std::string> seen;
  for (std::size_t e = 0; e < corpus->num_entities(); ++e) {
    CHECK(seen.insert(corpus->entity(e)).second);
    CHECK(corpus->entity(e) == fold_entity(corpus->entity(e)));
  }
  CHECK(corpus->entity(0) == "cotton");
}

TEST_CASE("incidence rows list exactly the given entities") {
  auto corpus = qrec::testing::toy_corpus();
  auto b = *corpus->find_entity("b");
  auto d = *corpus->find_entity("d");
  std::vector<std::uint32_t> row0(corpus->entities_of(0).begin(), corpus->entities_of(0).end());
  CHECK(row0 == std::vector<std::uint32_t>{0, static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(d)});
  CHECK(corpus->entities_of(3).empty());
  CHECK(corpus->incidence_nnz() == 7);
}

TEST_CASE("entity_column") {
  auto corpus = qrec::testing::toy_corpus();
  CHECK(corpus->entity_column(*corpus->find_entity("d")) == std::vector<std::uint8_t>{1, 0, 1, 0});
  CHECK(corpus->entity_column(*corpus->find_entity("c")) == std::vector<std::uint8_t>{0, 0, 0, 0});
  auto all = qrec::testing::make_corpus({{"x"}, {"x"}, {"x"}});
  CHECK(all->entity_column(0) == std::vector<std::uint8_t>{1, 1, 1});
}

TEST_CASE("heuristic entities rank frequent phrases first") {
  auto scored = heuristic_entities("soft cotton towel, cotton blend");
  REQUIRE(!scored.empty());
  CHECK(scored.front().entity == "cotton");
  double cotton = 0, towel = 0;
  for (const auto& s : scored) {
    if (s.entity == "cotton") cotton = s.score;
    if (s.entity == "towel") towel = s.score;
  }
  CHECK(cotton > towel);
  CHECK(heuristic_entities("the of and it is").empty());
}

TEST_CASE("heuristic entities match a hand-computed frequency table") {
  CHECK(heuristic_entities("soft cotton towel, cotton blend") ==
        concat({{"cotton", 1.0}}, half({"blend", "cotton blend", "cotton towel", "soft",
                                        "soft cotton", "soft cotton towel", "towel"})));
  CHECK(heuristic_entities("the steel pan and the steel lid") ==
        concat({{"steel", 1.0}}, half({"lid", "pan", "steel lid", "steel pan"})));
  CHECK(heuristic_entities("of the and").empty());
  CHECK(heuristic_entities("Glass jar. Glass jar lid!") ==
        concat({{"glass", 1.0}, {"glass jar", 1.0}, {"jar", 1.0}},
               half({"glass jar lid", "jar lid", "lid"})));
  std::vector<ScoredEntity> mugs = {{"mug", 1.0},
                                    {"mug mug", 2.0 / 3.0},
                                    {"cup", 1.0 / 3.0},
                                    {"mug cup", 1.0 / 3.0},
                                    {"mug mug cup", 1.0 / 3.0},
                                    {"mug mug mug", 1.0 / 3.0}};
  CHECK(heuristic_entities("mug mug mug cup") == mugs);
  CHECK(heuristic_entities("mug mug mug cup", 0.5) ==
        std::vector<ScoredEntity>{{"mug", 1.0}, {"mug mug", 2.0 / 3.0}});
}

TEST_CASE("question template") {
  CHECK(render_question("cotton") == "Are you seeking for a [cotton] related item?");
}

TEST_CASE("question pool removes each entity once") {
  QuestionPool pool(3);
  CHECK(pool.size() == 3);
  pool.take(1);
  CHECK_FALSE(pool.contains(1));
  CHECK(pool.available() == std::vector<std::size_t>{0, 2});
  CHECK_THROWS_AS(pool.take(1), Error);
  CHECK_THROWS_AS(pool.take(7), Error);
}
