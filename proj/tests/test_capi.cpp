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

// Exercises the shared library through its C header only.

#include "qrec/qrec.h"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

extern "C" int qrec_header_compiles_as_c(void);

namespace {

struct Owned {
  char* s = nullptr;
  ~Owned() { qrec_string_free(s); }
  std::string str() const { return s ? s : ""; }
};

qrec_dataset* small_dataset() {
  qrec_synthetic_config c;
  qrec_synthetic_default(&c);
  c.users = 60;
  c.items = 40;
  c.entities = 60;
  c.held_out_users = 0;
  qrec_dataset* ds = nullptr;
  REQUIRE(qrec_dataset_synthetic(&c, &ds) == QREC_OK);
  return ds;
}

std::size_t data_rows(const std::string& csv) {
  std::istringstream in(csv);
  std::size_t rows = 0;
  bool header = true;
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    ++rows;
  }
  return rows;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() /
         ("qrec_capi_" + std::to_string(::getpid()) + "_" + name);
}

}  // namespace

TEST_CASE("header is valid C") { CHECK(qrec_header_compiles_as_c() == 3); }

TEST_CASE("status reporting") {
  CHECK(std::string(qrec_version()).size() > 0);
  CHECK(std::string(qrec_status_name(QREC_NOT_FOUND)) == "not_found");
  qrec_dataset* ds = nullptr;
  CHECK(qrec_dataset_open("/nonexistent/qrec", &ds) != QREC_OK);
  CHECK(ds == nullptr);
  CHECK(std::string(qrec_last_error()).find("/nonexistent/qrec") != std::string::npos);
  CHECK(qrec_dataset_open(nullptr, &ds) == QREC_INVALID_ARGUMENT);
  qrec_hparams hp;
  qrec_hparams_default(&hp);
  CHECK(hp.latent_dim == 3);
  CHECK(hp.gamma == 0.5);
  CHECK(hp.max_iters == 100);
  hp.latent_dim = 0;
  qrec_model* m = nullptr;
  auto* d = small_dataset();
  CHECK(qrec_train(d, nullptr, &hp, &m, nullptr) == QREC_INVALID_ARGUMENT);
  qrec_dataset_free(d);
}

TEST_CASE("dataset, training and checkpoints") {
  auto* ds = small_dataset();
  qrec_summary s;
  REQUIRE(qrec_dataset_summary(ds, &s) == QREC_OK);
  CHECK(s.items == 40);
  Owned id;
  REQUIRE(qrec_item_id(ds, 7, &id.s) == QREC_OK);
  std::size_t back = 0;
  REQUIRE(qrec_item_index(ds, id.s, &back) == QREC_OK);
  CHECK(back == 7);
  CHECK(qrec_item_index(ds, "nope", &back) == QREC_NOT_FOUND);

  qrec_split split;
  qrec_split_default(&split);
  qrec_model* model = nullptr;
  double loss = -1;
  REQUIRE(qrec_train(ds, &split, nullptr, &model, &loss) == QREC_OK);
  CHECK(std::isfinite(loss));
  CHECK(loss >= 0);

  auto path = temp_path("model.qrec");
  REQUIRE(qrec_model_save(model, path.c_str()) == QREC_OK);
  qrec_model* loaded = nullptr;
  REQUIRE(qrec_model_load(path.c_str(), ds, &loaded) == QREC_OK);

  // Same checkpoint, same sessions.
  qrec_session *a = nullptr, *b = nullptr;
  REQUIRE(qrec_session_start(model, "U00001", nullptr, nullptr, &a) == QREC_OK);
  REQUIRE(qrec_session_start(loaded, "U00001", nullptr, nullptr, &b) == QREC_OK);
  qrec_recommendation ra[5], rb[5];
  std::size_t na = 0, nb = 0;
  qrec_session_top(a, 5, ra, &na);
  qrec_session_top(b, 5, rb, &nb);
  REQUIRE(na == 5);
  REQUIRE(nb == 5);
  for (int k = 0; k < 5; ++k) {
    CHECK(ra[k].item == rb[k].item);
    CHECK(ra[k].score == rb[k].score);
  }
  qrec_session_free(a);
  qrec_session_free(b);

  qrec_dataset* other = nullptr;
  REQUIRE(qrec_dataset_binary_code(64, 0, 11, &other) == QREC_OK);
  qrec_model* wrong = nullptr;
  CHECK(qrec_model_load(path.c_str(), other, &wrong) == QREC_STATE);
  CHECK(wrong == nullptr);
  qrec_dataset_free(other);

  std::filesystem::remove(path);
  qrec_model_free(loaded);
  qrec_model_free(model);
  qrec_dataset_free(ds);
}

TEST_CASE("sessions through the C API") {
  auto* ds = small_dataset();
  qrec_model* model = nullptr;
  REQUIRE(qrec_train(ds, nullptr, nullptr, &model, nullptr) == QREC_OK);
  qrec_session* s = nullptr;
  CHECK(qrec_session_start(model, "nobody", nullptr, nullptr, &s) == QREC_NOT_FOUND);
  REQUIRE(qrec_session_start(model, nullptr, nullptr, nullptr, &s) == QREC_OK);

  int has = 0;
  std::size_t entity = 0;
  Owned text;
  REQUIRE(qrec_session_next_question(s, &has, &entity, &text.s) == QREC_OK);
  REQUIRE(has == 1);
  CHECK(text.str().rfind("Are you seeking for a [", 0) == 0);
  CHECK(qrec_session_answer(s, entity + 1, QREC_YES) == QREC_PROTOCOL);
  REQUIRE(qrec_session_answer(s, entity, QREC_NO) == QREC_OK);
  std::size_t asked = 0, candidates = 0;
  qrec_session_progress(s, &asked, &candidates);
  CHECK(asked == 1);
  CHECK(candidates < 40);

  std::vector<qrec_recommendation> all(40);
  std::size_t n = 0;
  REQUIRE(qrec_session_top(s, 40, all.data(), &n) == QREC_OK);
  CHECK(n == 40);
  std::size_t rank = 0;
  REQUIRE(qrec_session_rank_of(s, all[3].item, &rank) == QREC_OK);
  CHECK(rank == 4);

  REQUIRE(qrec_session_next_question(s, &has, &entity, nullptr) == QREC_OK);
  REQUIRE(qrec_session_stop(s) == QREC_OK);
  CHECK(qrec_session_answer(s, entity, QREC_YES) == QREC_STATE);
  qrec_session_free(s);
  qrec_model_free(model);
  qrec_dataset_free(ds);
}

TEST_CASE("experiments and reports") {
  auto* ds = small_dataset();
  qrec_split split;
  qrec_split_default(&split);
  qrec_model* model = nullptr;
  REQUIRE(qrec_train(ds, &split, nullptr, &model, nullptr) == QREC_OK);

  std::size_t nq[] = {2, 5, 10, 15, 20};
  qrec_experiment_config c;
  qrec_experiment_default(&c);
  c.nq = nq;
  c.nq_count = 5;
  Owned csv;
  REQUIRE(qrec_experiment(model, &c, nullptr, &csv.s) == QREC_OK);
  CHECK(csv.str().rfind("# ", 0) == 0);
  CHECK(csv.str().find("policy,N_q,recall@5,AP@5,NDCG,MRR,sessions") != std::string::npos);
  CHECK(data_rows(csv.str()) == 5);

  c.cold = QREC_COLD_USER;
  Owned cold;
  REQUIRE(qrec_experiment(model, &c, nullptr, &cold.s) == QREC_OK);
  CHECK(cold.str().find("# cold=user") != std::string::npos);
  c.cold = QREC_COLD_NONE;

  std::size_t ten[] = {10};
  c.nq = ten;
  c.nq_count = 1;
  Owned sweep;
  REQUIRE(qrec_sweep(model, QREC_SWEEP_GAMMA, 0, 5, 0.5, &c, nullptr, &sweep.s) == QREC_OK);
  CHECK(data_rows(sweep.str()) == 11);

  Owned ablation;
  REQUIRE(qrec_ablation(model, &c, nullptr, &ablation.s) == QREC_OK);
  CHECK(data_rows(ablation.str()) == 2);

  Owned trajectory;
  qrec_session_options so;
  qrec_session_options_default(&so);
  REQUIRE(qrec_simulate_test(model, 5, 2, &so, nullptr, &trajectory.s) == QREC_OK);
  CHECK(trajectory.str().find("session=") == 0);
  Owned one;
  CHECK(qrec_simulate(model, "U00002", "I0004", 3, &so, nullptr, &one.s) == QREC_OK);
  CHECK(qrec_simulate(model, "U00002", "missing", 3, &so, nullptr, &one.s) == QREC_NOT_FOUND);

  qrec_model* unsplit = nullptr;
  REQUIRE(qrec_train(ds, nullptr, nullptr, &unsplit, nullptr) == QREC_OK);
  Owned none;
  CHECK(qrec_experiment(unsplit, &c, nullptr, &none.s) == QREC_STATE);

  qrec_model_free(unsplit);
  qrec_model_free(model);
  qrec_dataset_free(ds);
}

TEST_CASE("server lifecycle") {
  auto* ds = small_dataset();
  qrec_model* model = nullptr;
  REQUIRE(qrec_train(ds, nullptr, nullptr, &model, nullptr) == QREC_OK);
  qrec_server_config c;
  qrec_server_default(&c);
  CHECK(c.port == 8080);
  CHECK(c.nq_cap == 20);
  CHECK(c.ttl_seconds == 1800.0);
  c.port = 0;
  qrec_server* server = nullptr;
  REQUIRE(qrec_server_start(model, &c, &server) == QREC_OK);
  int port = qrec_server_port(server);
  CHECK(port > 0);
  c.port = port;
  qrec_server* clash = nullptr;
  CHECK(qrec_server_start(model, &c, &clash) == QREC_IO);
  CHECK(qrec_server_stop(server) == QREC_OK);
  qrec_server_free(server);
  qrec_model_free(model);
  qrec_dataset_free(ds);
}
