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

/* Qrec C API: question-based recommendation over a shared library boundary.
 *
 * Objects are opaque handles created by *_load / *_start / *_create calls and
 * released with the matching *_free. Every fallible call returns a
 * qrec_status; on failure qrec_last_error() describes the problem for the
 * calling thread. Strings returned through char** out-parameters are owned by
 * the caller and must be released with qrec_string_free().
 */
#ifndef QREC_QREC_H
#define QREC_QREC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define QREC_API __declspec(dllexport)
#else
#define QREC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qrec_status {
  QREC_OK = 0,
  QREC_INVALID_ARGUMENT = 1,
  QREC_IO = 2,
  QREC_PARSE = 3,
  QREC_NOT_FOUND = 4,
  QREC_STATE = 5,
  QREC_NUMERIC = 6,
  QREC_NO_QUESTIONS_LEFT = 7,
  QREC_PROTOCOL = 8,
  QREC_INTERNAL = 9
} qrec_status;

typedef enum qrec_answer { QREC_YES = 0, QREC_NO = 1, QREC_NOT_SURE = 2 } qrec_answer;

typedef enum qrec_policy {
  QREC_POLICY_QREC = 0,
  QREC_POLICY_RANDOM_QUESTION = 1,
  QREC_POLICY_UNIFORM_PRIOR_SBS = 2
} qrec_policy;

typedef enum qrec_cold { QREC_COLD_NONE = 0, QREC_COLD_USER = 1, QREC_COLD_ITEM = 2 } qrec_cold;

typedef enum qrec_sweep_param { QREC_SWEEP_GAMMA = 0, QREC_SWEEP_LATENT_DIM = 1 } qrec_sweep_param;

typedef struct qrec_dataset qrec_dataset;
typedef struct qrec_model qrec_model;
typedef struct qrec_session qrec_session;
typedef struct qrec_server qrec_server;

typedef struct qrec_hparams {
  int latent_dim;
  double lambda_u, lambda_v, lambda_p, lambda_q;
  double gamma;
  int max_iters;
  double adam_lr, adam_beta1, adam_beta2, adam_eps;
  double init_stddev;
  uint64_t seed;
  int als_sweeps;
} qrec_hparams;

typedef struct qrec_split {
  double train, validation, test;
  uint64_t seed;
} qrec_split;

typedef struct qrec_load_options {
  double entity_threshold;
  size_t min_item_transactions;
  size_t min_user_transactions;
} qrec_load_options;

typedef struct qrec_synthetic_config {
  size_t users, items, entities;
  int true_dim;
  size_t min_ratings_per_user, max_ratings_per_user;
  double taste_sharpness, topical_fraction, popularity_skew;
  double rating_center, rating_slope;
  double min_entity_density, max_entity_density;
  size_t held_out_users;
  uint64_t seed;
} qrec_synthetic_config;

typedef struct qrec_summary {
  size_t users, items, entities, ratings;
  double density;
} qrec_summary;

typedef struct qrec_recommendation {
  size_t item;  /* item index; see qrec_item_id */
  double score;
  size_t rank;  /* 1-based */
} qrec_recommendation;

typedef struct qrec_session_options {
  qrec_policy policy;
  uint64_t seed;
} qrec_session_options;

typedef struct qrec_experiment_config {
  qrec_policy policy;
  int random_init; /* nonzero: replace the trained factors with a seeded initialization */
  const size_t* nq;
  size_t nq_count;
  uint64_t seed;
  qrec_cold cold;
} qrec_experiment_config;

typedef struct qrec_server_config {
  const char* host;
  int port; /* 0 picks a free port */
  size_t nq_cap;
  double ttl_seconds;
  size_t grid_size;
  const char* cors_origin;
  uint64_t seed; /* 0: random session ids */
} qrec_server_config;

/* Errors and memory */
QREC_API const char* qrec_last_error(void);
QREC_API const char* qrec_status_name(qrec_status status);
QREC_API void qrec_string_free(char* s);
QREC_API const char* qrec_version(void);

/* Defaults */
QREC_API void qrec_hparams_default(qrec_hparams* hp);
QREC_API void qrec_split_default(qrec_split* split);
QREC_API void qrec_load_options_default(qrec_load_options* options);
QREC_API void qrec_synthetic_default(qrec_synthetic_config* config);
QREC_API void qrec_session_options_default(qrec_session_options* options);
QREC_API void qrec_experiment_default(qrec_experiment_config* config);
QREC_API void qrec_server_default(qrec_server_config* config);

/* Datasets */
QREC_API qrec_status qrec_dataset_load(const char* items_file, const char* entities_file,
                                       const char* ratings_file,
                                       const qrec_load_options* options, qrec_dataset** out);
/* Reads items.tsv, entities.tsv and ratings.tsv from a directory, unfiltered. */
QREC_API qrec_status qrec_dataset_open(const char* dir, qrec_dataset** out);
QREC_API qrec_status qrec_dataset_synthetic(const qrec_synthetic_config* config,
                                            qrec_dataset** out);
QREC_API qrec_status qrec_dataset_binary_code(size_t users, int with_redundant, uint64_t seed,
                                              qrec_dataset** out);
QREC_API qrec_status qrec_dataset_write(const qrec_dataset* dataset, const char* dir);
QREC_API qrec_status qrec_dataset_summary(const qrec_dataset* dataset, qrec_summary* out);
QREC_API qrec_status qrec_item_id(const qrec_dataset* dataset, size_t item, char** out);
QREC_API qrec_status qrec_item_index(const qrec_dataset* dataset, const char* item_id,
                                     size_t* out);
QREC_API void qrec_dataset_free(qrec_dataset* dataset);

/* Models. Training uses the train part of `split` (NULL: all ratings). */
QREC_API qrec_status qrec_train(const qrec_dataset* dataset, const qrec_split* split,
                                const qrec_hparams* hp, qrec_model** out, double* final_loss);
QREC_API qrec_status qrec_model_save(const qrec_model* model, const char* path);
/* Rebinds a checkpoint to the dataset it was trained on; a different corpus
 * or rating set is rejected. */
QREC_API qrec_status qrec_model_load(const char* path, const qrec_dataset* dataset,
                                     qrec_model** out);
QREC_API qrec_status qrec_model_hparams(const qrec_model* model, qrec_hparams* out);
QREC_API void qrec_model_free(qrec_model* model);

/* Sessions. user_id NULL starts a cold session; hp NULL uses the model's. */
QREC_API qrec_status qrec_session_start(const qrec_model* model, const char* user_id,
                                        const qrec_session_options* options,
                                        const qrec_hparams* hp, qrec_session** out);
/* *has_question is 0 once one candidate is left or the pool is empty. */
QREC_API qrec_status qrec_session_next_question(qrec_session* session, int* has_question,
                                                size_t* entity, char** text);
QREC_API qrec_status qrec_session_answer(qrec_session* session, size_t entity,
                                         qrec_answer answer);
QREC_API qrec_status qrec_session_stop(qrec_session* session);
/* Writes up to k entries to out; *count receives the number written. */
QREC_API qrec_status qrec_session_top(const qrec_session* session, size_t k,
                                      qrec_recommendation* out, size_t* count);
QREC_API qrec_status qrec_session_rank_of(const qrec_session* session, size_t item,
                                          size_t* rank);
QREC_API qrec_status qrec_session_progress(const qrec_session* session, size_t* questions_asked,
                                           size_t* candidates);
QREC_API void qrec_session_free(qrec_session* session);

/* Experiments. CSV reports start with '#'-prefixed key=value config lines. */
QREC_API qrec_status qrec_simulate(const qrec_model* model, const char* user_id,
                                   const char* target_item, size_t nq,
                                   const qrec_session_options* options, const qrec_hparams* hp,
                                   char** trajectory);
QREC_API qrec_status qrec_simulate_test(const qrec_model* model, size_t nq, size_t limit,
                                        const qrec_session_options* options,
                                        const qrec_hparams* hp, char** trajectory);
QREC_API qrec_status qrec_experiment(const qrec_model* model,
                                     const qrec_experiment_config* config,
                                     const qrec_hparams* hp, char** csv);
QREC_API qrec_status qrec_ablation(const qrec_model* model, const qrec_experiment_config* config,
                                   const qrec_hparams* hp, char** csv);
QREC_API qrec_status qrec_sweep(const qrec_model* model, qrec_sweep_param param, double from,
                                double to, double step, const qrec_experiment_config* config,
                                const qrec_hparams* hp, char** csv);

/* HTTP service */
QREC_API qrec_status qrec_server_start(const qrec_model* model, const qrec_server_config* config,
                                       qrec_server** out);
QREC_API int qrec_server_port(const qrec_server* server);
/* Blocks until the server stops. */
QREC_API qrec_status qrec_server_wait(qrec_server* server);
QREC_API qrec_status qrec_server_stop(qrec_server* server);
QREC_API void qrec_server_free(qrec_server* server);

#ifdef __cplusplus
}
#endif

#endif /* QREC_QREC_H */
