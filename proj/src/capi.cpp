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

#include "qrec/qrec.h"

#include "qrec/checkpoint.hpp"
#include "qrec/dataset.hpp"
#include "qrec/eval.hpp"
#include "qrec/service.hpp"
#include "qrec/session.hpp"
#include "qrec/synthetic.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <new>
#include <sstream>

struct qrec_dataset {
  std::shared_ptr<const qrec::Dataset> dataset;
};

struct qrec_model {
  std::shared_ptr<const qrec::Dataset> dataset;
  qrec::Checkpoint checkpoint;
  std::optional<qrec::SplitSpec> split_spec;
  qrec::Split split;
  std::shared_ptr<const qrec::RatingMatrix> train;
  std::shared_ptr<const qrec::LatentModel> model;
  std::shared_ptr<const qrec::SessionContext> context;
};

struct qrec_session {
  std::shared_ptr<const qrec::Dataset> dataset;
  std::unique_ptr<qrec::Session> session;
};

struct qrec_server {
  std::shared_ptr<qrec::SessionService> service;
  std::unique_ptr<qrec::HttpServer> http;
};

namespace {

thread_local std::string last_error;

qrec_status to_status(qrec::ErrorCode code) {
  switch (code) {
    case qrec::ErrorCode::invalid_argument: return QREC_INVALID_ARGUMENT;
    case qrec::ErrorCode::io: return QREC_IO;
    case qrec::ErrorCode::parse: return QREC_PARSE;
    case qrec::ErrorCode::not_found: return QREC_NOT_FOUND;
    case qrec::ErrorCode::state: return QREC_STATE;
    case qrec::ErrorCode::numeric: return QREC_NUMERIC;
    case qrec::ErrorCode::no_questions_left: return QREC_NO_QUESTIONS_LEFT;
    case qrec::ErrorCode::protocol: return QREC_PROTOCOL;
  }
  return QREC_INTERNAL;
}

template <class F>
qrec_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return QREC_OK;
  } catch (const qrec::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return QREC_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return QREC_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return QREC_INTERNAL;
  }
}

void require(const void* pointer, const char* name) {
  if (pointer == nullptr) {
    throw qrec::Error(qrec::ErrorCode::invalid_argument, std::string(name) + " is null");
  }
}

char* dup_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

qrec::HyperParams from_c(const qrec_hparams& c) {
  qrec::HyperParams hp;
  hp.latent_dim = c.latent_dim;
  hp.lambda_u = c.lambda_u;
  hp.lambda_v = c.lambda_v;
  hp.lambda_p = c.lambda_p;
  hp.lambda_q = c.lambda_q;
  hp.gamma = c.gamma;
  hp.max_iters = c.max_iters;
  hp.adam_lr = c.adam_lr;
  hp.adam_beta1 = c.adam_beta1;
  hp.adam_beta2 = c.adam_beta2;
  hp.adam_eps = c.adam_eps;
  hp.init_stddev = c.init_stddev;
  hp.seed = c.seed;
  hp.als_sweeps = c.als_sweeps;
  hp.validate();
  return hp;
}

qrec_hparams to_c(const qrec::HyperParams& hp) {
  return {hp.latent_dim, hp.lambda_u,   hp.lambda_v,   hp.lambda_p, hp.lambda_q,
          hp.gamma,      hp.max_iters,  hp.adam_lr,    hp.adam_beta1, hp.adam_beta2,
          hp.adam_eps,   hp.init_stddev, hp.seed,      hp.als_sweeps};
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string describe_split(const std::optional<qrec::SplitSpec>& spec) {
  if (!spec) return "none";
  std::ostringstream out;
  out.precision(17);
  out << spec->train << ',' << spec->validation << ',' << spec->test << ',' << spec->seed;
  return out.str();
}

std::optional<qrec::SplitSpec> parse_split(const std::string& text) {
  if (text == "none") return std::nullopt;
  qrec::SplitSpec spec;
  char c1 = 0, c2 = 0, c3 = 0;
  std::istringstream in(text);
  in >> spec.train >> c1 >> spec.validation >> c2 >> spec.test >> c3 >> spec.seed;
  if (!in || c1 != ',' || c2 != ',' || c3 != ',') {
    throw qrec::Error(qrec::ErrorCode::parse, "checkpoint has a malformed split '" + text + "'");
  }
  spec.validate();
  return spec;
}

// Shared tail of train and load: split the ratings and build the session
// context around the model.
void bind_model(qrec_model& m) {
  const auto& ds = *m.dataset;
  if (m.split_spec) {
    m.split = qrec::split_dataset(ds.ratings, *m.split_spec);
  } else {
    m.split = {ds.ratings, {}, {}};
  }
  m.train = std::make_shared<qrec::RatingMatrix>(ds.matrix(m.split.train));
  m.model = std::make_shared<qrec::LatentModel>(m.checkpoint.model);
  m.context = std::make_shared<qrec::SessionContext>(ds.corpus, m.train, m.model);
}

qrec::HyperParams online_hp(const qrec_model& model, const qrec_hparams* hp) {
  return hp != nullptr ? from_c(*hp) : model.checkpoint.hp;
}

qrec::SessionOptions session_options(const qrec_session_options* options,
                                     const qrec::HyperParams& hp) {
  qrec::SessionOptions out;
  out.hp = hp;
  if (options != nullptr) {
    out.policy = options->policy == QREC_POLICY_RANDOM_QUESTION ? qrec::QuestionPolicy::random
                                                                : qrec::QuestionPolicy::gbs;
    out.prior = options->policy == QREC_POLICY_UNIFORM_PRIOR_SBS ? qrec::PriorKind::uniform
                                                                 : qrec::PriorKind::ranked;
    out.seed = options->seed;
  }
  return out;
}

std::optional<std::size_t> lookup_user(const qrec::Dataset& ds, const char* user_id) {
  if (user_id == nullptr) return std::nullopt;
  auto user = ds.find_user(user_id);
  if (!user) throw qrec::Error(qrec::ErrorCode::not_found, std::string("unknown user '") + user_id + "'");
  return user;
}

std::size_t lookup_item(const qrec::Dataset& ds, const char* item_id) {
  require(item_id, "item id");
  auto item = ds.corpus->find_item(item_id);
  if (!item) throw qrec::Error(qrec::ErrorCode::not_found, std::string("unknown item '") + item_id + "'");
  return *item;
}

qrec::Policy to_policy(qrec_policy policy) {
  switch (policy) {
    case QREC_POLICY_QREC: return qrec::Policy::qrec;
    case QREC_POLICY_RANDOM_QUESTION: return qrec::Policy::random_question;
    case QREC_POLICY_UNIFORM_PRIOR_SBS: return qrec::Policy::uniform_prior_sbs;
  }
  throw qrec::Error(qrec::ErrorCode::invalid_argument, "unknown policy");
}

struct ExperimentSetup {
  qrec::ExperimentData data;
  qrec::ExperimentConfig config;
  std::string cold;
};

ExperimentSetup experiment_setup(const qrec_model& model, const qrec_experiment_config* c,
                                 const qrec_hparams* hp) {
  require(c, "experiment config");
  if (!model.split_spec) {
    throw qrec::Error(qrec::ErrorCode::state, "model was trained without a split; no test tuples");
  }
  ExperimentSetup setup;
  setup.data = {model.dataset->corpus, model.train, model.model, model.split.test};
  setup.cold = "none";
  if (c->cold != QREC_COLD_NONE) {
    auto cold = qrec::extract_cold_tuples(model.split.train, model.split.test);
    setup.data.test = c->cold == QREC_COLD_USER ? cold.cold_user : cold.cold_item;
    setup.cold = c->cold == QREC_COLD_USER ? "user" : "item";
  }
  setup.config.policy = to_policy(c->policy);
  setup.config.init = c->random_init != 0 ? qrec::InitMode::random : qrec::InitMode::offline;
  if (c->nq_count > 0) {
    require(c->nq, "nq");
    setup.config.nq.assign(c->nq, c->nq + c->nq_count);
  }
  setup.config.hp = online_hp(model, hp);
  setup.config.seed = c->seed;
  return setup;
}

std::string echo_lines(const std::string& config_echo, const ExperimentSetup& setup,
                       const qrec_model& model) {
  std::ostringstream out;
  std::istringstream in(config_echo);
  for (std::string line; std::getline(in, line);) out << "# " << line << '\n';
  out << "# cold=" << setup.cold << "\n# split=" << describe_split(model.split_spec)
      << "\n# dataset_fingerprint=" << hex64(model.dataset->fingerprint()) << '\n';
  return out.str();
}

}  // namespace

extern "C" {

const char* qrec_last_error(void) { return last_error.c_str(); }

const char* qrec_status_name(qrec_status status) {
  switch (status) {
    case QREC_OK: return "ok";
    case QREC_INVALID_ARGUMENT: return "invalid_argument";
    case QREC_IO: return "io";
    case QREC_PARSE: return "parse";
    case QREC_NOT_FOUND: return "not_found";
    case QREC_STATE: return "state";
    case QREC_NUMERIC: return "numeric";
    case QREC_NO_QUESTIONS_LEFT: return "no_questions_left";
    case QREC_PROTOCOL: return "protocol";
    case QREC_INTERNAL: return "internal";
  }
  return "unknown";
}

void qrec_string_free(char* s) { std::free(s); }

const char* qrec_version(void) { return "0.1.0"; }

void qrec_hparams_default(qrec_hparams* hp) {
  if (hp != nullptr) *hp = to_c(qrec::HyperParams{});
}

void qrec_split_default(qrec_split* split) {
  if (split == nullptr) return;
  qrec::SplitSpec spec;
  *split = {spec.train, spec.validation, spec.test, spec.seed};
}

void qrec_load_options_default(qrec_load_options* options) {
  if (options == nullptr) return;
  *options = {qrec::kDefaultEntityThreshold, 0, 0};
}

void qrec_synthetic_default(qrec_synthetic_config* config) {
  if (config == nullptr) return;
  qrec::SyntheticConfig c;
  *config = {c.users,
             c.items,
             c.entities,
             c.true_dim,
             c.min_ratings_per_user,
             c.max_ratings_per_user,
             c.taste_sharpness,
             c.topical_fraction,
             c.popularity_skew,
             c.rating_center,
             c.rating_slope,
             c.min_entity_density,
             c.max_entity_density,
             c.held_out_users,
             c.seed};
}

void qrec_session_options_default(qrec_session_options* options) {
  if (options != nullptr) *options = {QREC_POLICY_QREC, 0};
}

void qrec_experiment_default(qrec_experiment_config* config) {
  if (config != nullptr) *config = {QREC_POLICY_QREC, 0, nullptr, 0, 42, QREC_COLD_NONE};
}

void qrec_server_default(qrec_server_config* config) {
  if (config == nullptr) return;
  qrec::ServiceConfig c;
  *config = {"127.0.0.1", 8080, c.nq_cap, static_cast<double>(c.ttl.count()), c.grid_size,
             "*",         0};
}

qrec_status qrec_dataset_load(const char* items_file, const char* entities_file,
                              const char* ratings_file, const qrec_load_options* options,
                              qrec_dataset** out) {
  return guarded([&] {
    require(items_file, "items file");
    require(entities_file, "entities file");
    require(ratings_file, "ratings file");
    require(out, "out");
    qrec_load_options opts;
    qrec_load_options_default(&opts);
    if (options != nullptr) opts = *options;
    qrec::RatingsLoadOptions ropts{opts.min_item_transactions, opts.min_user_transactions};
    auto ds = qrec::load_dataset({items_file, entities_file, ratings_file}, opts.entity_threshold,
                                 ropts);
    *out = new qrec_dataset{std::make_shared<const qrec::Dataset>(std::move(ds))};
  });
}

qrec_status qrec_dataset_open(const char* dir, qrec_dataset** out) {
  return guarded([&] {
    require(dir, "dir");
    require(out, "out");
    auto ds = qrec::load_dataset(qrec::DatasetFiles::in(dir), 0.0);
    *out = new qrec_dataset{std::make_shared<const qrec::Dataset>(std::move(ds))};
  });
}

qrec_status qrec_dataset_synthetic(const qrec_synthetic_config* config, qrec_dataset** out) {
  return guarded([&] {
    require(out, "out");
    qrec::SyntheticConfig c;
    if (config != nullptr) {
      c.users = config->users;
      c.items = config->items;
      c.entities = config->entities;
      c.true_dim = config->true_dim;
      c.min_ratings_per_user = config->min_ratings_per_user;
      c.max_ratings_per_user = config->max_ratings_per_user;
      c.taste_sharpness = config->taste_sharpness;
      c.topical_fraction = config->topical_fraction;
      c.popularity_skew = config->popularity_skew;
      c.rating_center = config->rating_center;
      c.rating_slope = config->rating_slope;
      c.min_entity_density = config->min_entity_density;
      c.max_entity_density = config->max_entity_density;
      c.held_out_users = config->held_out_users;
      c.seed = config->seed;
    }
    auto syn = qrec::generate_benchmark(c);
    *out = new qrec_dataset{std::make_shared<const qrec::Dataset>(std::move(syn.dataset))};
  });
}

qrec_status qrec_dataset_binary_code(size_t users, int with_redundant, uint64_t seed,
                                     qrec_dataset** out) {
  return guarded([&] {
    require(out, "out");
    auto ds = qrec::binary_code_dataset(users, with_redundant != 0, seed);
    *out = new qrec_dataset{std::make_shared<const qrec::Dataset>(std::move(ds))};
  });
}

qrec_status qrec_dataset_write(const qrec_dataset* dataset, const char* dir) {
  return guarded([&] {
    require(dataset, "dataset");
    require(dir, "dir");
    qrec::write_dataset(*dataset->dataset, dir);
  });
}

qrec_status qrec_dataset_summary(const qrec_dataset* dataset, qrec_summary* out) {
  return guarded([&] {
    require(dataset, "dataset");
    require(out, "out");
    auto s = qrec::summarize(*dataset->dataset);
    *out = {s.users, s.items, s.entities, s.ratings, s.density};
  });
}

qrec_status qrec_item_id(const qrec_dataset* dataset, size_t item, char** out) {
  return guarded([&] {
    require(dataset, "dataset");
    require(out, "out");
    *out = dup_string(dataset->dataset->corpus->item(item).item_id);
  });
}

qrec_status qrec_item_index(const qrec_dataset* dataset, const char* item_id, size_t* out) {
  return guarded([&] {
    require(dataset, "dataset");
    require(out, "out");
    *out = lookup_item(*dataset->dataset, item_id);
  });
}

void qrec_dataset_free(qrec_dataset* dataset) { delete dataset; }

qrec_status qrec_train(const qrec_dataset* dataset, const qrec_split* split,
                       const qrec_hparams* hp, qrec_model** out, double* final_loss) {
  return guarded([&] {
    require(dataset, "dataset");
    require(out, "out");
    auto m = std::make_unique<qrec_model>();
    m->dataset = dataset->dataset;
    m->checkpoint.hp = hp != nullptr ? from_c(*hp) : qrec::HyperParams{};
    if (split != nullptr) {
      m->split_spec = qrec::SplitSpec{split->train, split->validation, split->test, split->seed};
      m->split_spec->validate();
    }
    const auto& ds = *m->dataset;
    auto parts = m->split_spec ? qrec::split_dataset(ds.ratings, *m->split_spec)
                               : qrec::Split{ds.ratings, {}, {}};
    qrec::TrainReport report;
    m->checkpoint.model = qrec::train_offline(ds.matrix(parts.train), m->checkpoint.hp, &report);
    m->checkpoint.corpus_fingerprint = ds.corpus->fingerprint();
    m->checkpoint.meta["dataset_fingerprint"] = hex64(ds.fingerprint());
    m->checkpoint.meta["split"] = describe_split(m->split_spec);
    m->checkpoint.meta["train_ratings"] = std::to_string(parts.train.size());
    bind_model(*m);
    if (final_loss != nullptr) *final_loss = report.loss_history.back();
    *out = m.release();
  });
}

qrec_status qrec_model_save(const qrec_model* model, const char* path) {
  return guarded([&] {
    require(model, "model");
    require(path, "path");
    qrec::save_checkpoint(model->checkpoint, path);
  });
}

qrec_status qrec_model_load(const char* path, const qrec_dataset* dataset, qrec_model** out) {
  return guarded([&] {
    require(path, "path");
    require(dataset, "dataset");
    require(out, "out");
    auto m = std::make_unique<qrec_model>();
    m->dataset = dataset->dataset;
    m->checkpoint = qrec::load_checkpoint(path);
    const auto& ds = *m->dataset;
    if (m->checkpoint.corpus_fingerprint != ds.corpus->fingerprint()) {
      throw qrec::Error(qrec::ErrorCode::state,
                        std::string("checkpoint ") + path + " was trained on a different corpus");
    }
    auto fp = m->checkpoint.meta.find("dataset_fingerprint");
    if (fp != m->checkpoint.meta.end() && fp->second != hex64(ds.fingerprint())) {
      throw qrec::Error(qrec::ErrorCode::state,
                        std::string("checkpoint ") + path + " was trained on different ratings");
    }
    if (m->checkpoint.model.num_users() != ds.num_users() ||
        m->checkpoint.model.num_items() != ds.num_items()) {
      throw qrec::Error(qrec::ErrorCode::state, "checkpoint dimensions do not match the dataset");
    }
    auto split = m->checkpoint.meta.find("split");
    m->split_spec = parse_split(split == m->checkpoint.meta.end() ? "none" : split->second);
    bind_model(*m);
    *out = m.release();
  });
}

qrec_status qrec_model_hparams(const qrec_model* model, qrec_hparams* out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    *out = to_c(model->checkpoint.hp);
  });
}

void qrec_model_free(qrec_model* model) { delete model; }

qrec_status qrec_session_start(const qrec_model* model, const char* user_id,
                               const qrec_session_options* options, const qrec_hparams* hp,
                               qrec_session** out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    auto user = lookup_user(*model->dataset, user_id);
    auto s = std::make_unique<qrec_session>();
    s->dataset = model->dataset;
    s->session = std::make_unique<qrec::Session>(model->context, user,
                                                 session_options(options, online_hp(*model, hp)));
    *out = s.release();
  });
}

qrec_status qrec_session_next_question(qrec_session* session, int* has_question, size_t* entity,
                                       char** text) {
  return guarded([&] {
    require(session, "session");
    require(has_question, "has_question");
    auto q = session->session->next_question();
    *has_question = q ? 1 : 0;
    if (q && entity != nullptr) *entity = q->entity;
    if (text != nullptr) *text = q ? dup_string(q->text) : nullptr;
  });
}

qrec_status qrec_session_answer(qrec_session* session, size_t entity, qrec_answer answer) {
  return guarded([&] {
    require(session, "session");
    qrec::Answer a = answer == QREC_YES  ? qrec::Answer::yes
                     : answer == QREC_NO ? qrec::Answer::no
                                         : qrec::Answer::not_sure;
    if (answer != QREC_YES && answer != QREC_NO && answer != QREC_NOT_SURE) {
      throw qrec::Error(qrec::ErrorCode::invalid_argument, "unknown answer value");
    }
    session->session->apply_answer(entity, a);
  });
}

qrec_status qrec_session_stop(qrec_session* session) {
  return guarded([&] {
    require(session, "session");
    session->session->stop();
  });
}

qrec_status qrec_session_top(const qrec_session* session, size_t k, qrec_recommendation* out,
                             size_t* count) {
  return guarded([&] {
    require(session, "session");
    require(out, "out");
    require(count, "count");
    auto recs = session->session->recommendations(k);
    for (std::size_t i = 0; i < recs.size(); ++i) out[i] = {recs[i].item, recs[i].score, recs[i].rank};
    *count = recs.size();
  });
}

qrec_status qrec_session_rank_of(const qrec_session* session, size_t item, size_t* rank) {
  return guarded([&] {
    require(session, "session");
    require(rank, "rank");
    *rank = session->session->rank_of(static_cast<std::uint32_t>(item));
  });
}

qrec_status qrec_session_progress(const qrec_session* session, size_t* questions_asked,
                                  size_t* candidates) {
  return guarded([&] {
    require(session, "session");
    if (questions_asked != nullptr) *questions_asked = session->session->questions_asked();
    if (candidates != nullptr) *candidates = session->session->candidates().size();
  });
}

void qrec_session_free(qrec_session* session) { delete session; }

qrec_status qrec_simulate(const qrec_model* model, const char* user_id, const char* target_item,
                          size_t nq, const qrec_session_options* options, const qrec_hparams* hp,
                          char** trajectory) {
  return guarded([&] {
    require(model, "model");
    require(trajectory, "trajectory");
    const auto& ds = *model->dataset;
    auto user = lookup_user(ds, user_id);
    auto target = lookup_item(ds, target_item);
    auto traj = qrec::run_session(model->context, user, target, nq,
                                  session_options(options, online_hp(*model, hp)), false);
    std::string id = std::string(user_id ? user_id : "cold") + ":" + target_item;
    std::string text;
    for (const auto& step : traj.steps) {
      text += qrec::format_trajectory_line(id, step, *ds.corpus) + '\n';
    }
    *trajectory = dup_string(text);
  });
}

qrec_status qrec_simulate_test(const qrec_model* model, size_t nq, size_t limit,
                               const qrec_session_options* options, const qrec_hparams* hp,
                               char** trajectory) {
  return guarded([&] {
    require(model, "model");
    require(trajectory, "trajectory");
    const auto& ds = *model->dataset;
    auto opts = session_options(options, online_hp(*model, hp));
    std::string text;
    const auto& test = model->split.test;
    std::size_t n = limit == 0 ? test.size() : std::min(limit, test.size());
    for (std::size_t s = 0; s < n; ++s) {
      const auto& triple = test[s];
      auto traj = qrec::run_session(model->context, triple.user, triple.item, nq, opts, false);
      std::string id = ds.user_ids[triple.user] + ":" + ds.corpus->item(triple.item).item_id;
      for (const auto& step : traj.steps) {
        text += qrec::format_trajectory_line(id, step, *ds.corpus) + '\n';
      }
    }
    *trajectory = dup_string(text);
  });
}

qrec_status qrec_experiment(const qrec_model* model, const qrec_experiment_config* config,
                            const qrec_hparams* hp, char** csv) {
  return guarded([&] {
    require(model, "model");
    require(csv, "csv");
    auto setup = experiment_setup(*model, config, hp);
    auto report = qrec::run_experiment(setup.data, setup.config);
    *csv = dup_string(echo_lines(report.config_echo, setup, *model) + report.to_csv());
  });
}

qrec_status qrec_ablation(const qrec_model* model, const qrec_experiment_config* config,
                          const qrec_hparams* hp, char** csv) {
  return guarded([&] {
    require(model, "model");
    require(csv, "csv");
    auto setup = experiment_setup(*model, config, hp);
    auto report = qrec::ablation_offline_init(setup.data, setup.config);
    *csv = dup_string(echo_lines(report.offline.config_echo, setup, *model) +
                      report.offline.to_csv() + report.random.to_csv(false));
  });
}

qrec_status qrec_sweep(const qrec_model* model, qrec_sweep_param param, double from, double to,
                       double step, const qrec_experiment_config* config, const qrec_hparams* hp,
                       char** csv) {
  return guarded([&] {
    require(model, "model");
    require(csv, "csv");
    auto setup = experiment_setup(*model, config, hp);
    auto grid = qrec::make_grid(from, to, step);
    auto which = param == QREC_SWEEP_GAMMA ? qrec::SweepParam::gamma : qrec::SweepParam::latent_dim;
    auto points = qrec::sweep(which, grid, setup.data, setup.config);
    std::string text = echo_lines(points.front().report.config_echo, setup, *model);
    text += "# sweep=" + std::string(param == QREC_SWEEP_GAMMA ? "gamma" : "k") + '\n';
    for (std::size_t i = 0; i < points.size(); ++i) text += points[i].report.to_csv(i == 0);
    *csv = dup_string(text);
  });
}

qrec_status qrec_server_start(const qrec_model* model, const qrec_server_config* config,
                              qrec_server** out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    qrec_server_config c;
    qrec_server_default(&c);
    if (config != nullptr) c = *config;
    if (c.host == nullptr) c.host = "127.0.0.1";
    if (c.ttl_seconds <= 0) throw qrec::Error(qrec::ErrorCode::invalid_argument, "ttl must be positive");
    qrec::ServiceConfig sc;
    sc.nq_cap = c.nq_cap;
    sc.ttl = std::chrono::seconds(static_cast<long long>(c.ttl_seconds));
    sc.grid_size = c.grid_size;
    sc.cors_origin = c.cors_origin != nullptr ? c.cors_origin : "*";
    sc.hp = model->checkpoint.hp;
    sc.seed = c.seed;
    auto server = std::make_unique<qrec_server>();
    server->service = std::make_shared<qrec::SessionService>(model->dataset, model->context, sc);
    server->http = std::make_unique<qrec::HttpServer>(server->service);
    server->http->start(c.host, c.port);
    *out = server.release();
  });
}

int qrec_server_port(const qrec_server* server) {
  return server != nullptr ? server->http->port() : -1;
}

qrec_status qrec_server_wait(qrec_server* server) {
  return guarded([&] {
    require(server, "server");
    server->http->wait();
  });
}

qrec_status qrec_server_stop(qrec_server* server) {
  return guarded([&] {
    require(server, "server");
    server->http->stop();
  });
}

void qrec_server_free(qrec_server* server) { delete server; }

}  // extern "C"
