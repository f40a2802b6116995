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

// qrec command-line tool. Talks to the library through the C API only.

#include "qrec/qrec.h"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Failure {
  std::string message;
};

void check(qrec_status status, const std::string& what) {
  if (status != QREC_OK) {
    throw Failure{what + ": " + qrec_status_name(status) + ": " + qrec_last_error()};
  }
}

struct OwnedString {
  char* s = nullptr;
  ~OwnedString() { qrec_string_free(s); }
  std::string str() const { return s ? s : ""; }
};

using DatasetPtr = std::unique_ptr<qrec_dataset, decltype(&qrec_dataset_free)>;
using ModelPtr = std::unique_ptr<qrec_model, decltype(&qrec_model_free)>;

struct Options {
  std::string data;
  std::string checkpoint;
  std::string out = "reports";
  std::uint64_t seed = 42;
  std::uint64_t split_seed = 42;
  std::optional<double> gamma;
  int k = 3;
  int iters = 100;
  double lambda = 0.1;
  int als_sweeps = 1;
  std::vector<std::size_t> nq;

  // ingest
  std::string items, entities, ratings;
  bool synthetic = false;
  bool binary_code = false;
  bool redundant = false;
  std::uint64_t synthetic_seed = 7;
  double threshold = 0.1;
  std::size_t min_item = 5;
  std::size_t min_user = 5;

  // simulate / experiment / sweep
  std::string user, target;
  std::size_t limit = 0;
  std::string policy = "qrec";
  std::string cold = "none";
  std::string init = "offline";
  std::string param = "gamma";
  double from = 0.0, to = 5.0, step = 0.5;

  // serve
  std::string host = "127.0.0.1";
  int port = 8080;
  std::size_t nq_cap = 20;
  double ttl = 1800.0;
  std::size_t grid = 16;
  std::string cors = "*";
};

std::string checkpoint_path(const Options& o) {
  if (!o.checkpoint.empty()) return o.checkpoint;
  if (o.data.empty()) throw Failure{"--data is required"};
  return (fs::path(o.data) / "model.qrec").string();
}

DatasetPtr open_dataset(const Options& o) {
  if (o.data.empty()) throw Failure{"--data is required"};
  qrec_dataset* ds = nullptr;
  check(qrec_dataset_open(o.data.c_str(), &ds), "opening " + o.data);
  return {ds, &qrec_dataset_free};
}

ModelPtr load_model(const Options& o, const qrec_dataset* ds) {
  auto path = checkpoint_path(o);
  qrec_model* model = nullptr;
  check(qrec_model_load(path.c_str(), ds, &model), "loading checkpoint " + path);
  return {model, &qrec_model_free};
}

// Online hyperparameters: the checkpoint's, with flag overrides.
qrec_hparams online_hparams(const Options& o, const qrec_model* model) {
  qrec_hparams hp;
  check(qrec_model_hparams(model, &hp), "reading hyperparameters");
  if (o.gamma) hp.gamma = *o.gamma;
  hp.als_sweeps = o.als_sweeps;
  return hp;
}

qrec_policy policy_of(const std::string& name) {
  if (name == "qrec") return QREC_POLICY_QREC;
  if (name == "random") return QREC_POLICY_RANDOM_QUESTION;
  if (name == "sbs") return QREC_POLICY_UNIFORM_PRIOR_SBS;
  throw Failure{"unknown policy '" + name + "'"};
}

// Writes via a temporary file so a failed run never leaves a truncated report.
void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    out << text;
    if (!out) throw Failure{"cannot write " + tmp.string()};
  }
  fs::rename(tmp, path);
}

std::string echo(const CLI::App& app, const std::string& command) {
  std::ostringstream out;
  out << "# command=" << command << '\n';
  std::istringstream in(app.config_to_str(true, false));
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line.front() == '[') continue;
    auto key = line.substr(0, line.find('='));
    auto dot = key.find('.');
    if (dot != std::string::npos && key.substr(0, dot) != command) continue;
    out << "# " << line << '\n';
  }
  return out.str();
}

// Concatenates CSV reports: comment lines and header from the first only.
std::string merge_csv(const std::vector<std::string>& parts) {
  std::string merged;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    std::istringstream in(parts[p]);
    bool header_seen = false;
    for (std::string line; std::getline(in, line);) {
      bool comment = !line.empty() && line.front() == '#';
      bool header = !comment && !header_seen;
      if (header) header_seen = true;
      if (p > 0 && (comment || header)) continue;
      merged += line + '\n';
    }
  }
  return merged;
}

void print_table(const std::string& csv) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(csv);
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> cells;
    std::istringstream cell_in(line);
    for (std::string cell; std::getline(cell_in, cell, ',');) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  std::vector<std::size_t> width;
  for (const auto& r : rows) {
    width.resize(std::max(width.size(), r.size()));
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
  }
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      std::cout << r[c] << std::string(width[c] - r[c].size() + 2, ' ');
    }
    std::cout << '\n';
  }
}

void print_summary(const qrec_dataset* ds) {
  qrec_summary s;
  check(qrec_dataset_summary(ds, &s), "summarizing");
  std::printf("users %zu\nitems %zu\nentities %zu\nratings %zu\ndensity %.2f%%\n", s.users,
              s.items, s.entities, s.ratings, 100.0 * s.density);
}

void cmd_ingest(const Options& o) {
  qrec_dataset* raw = nullptr;
  if (o.synthetic) {
    qrec_synthetic_config c;
    qrec_synthetic_default(&c);
    c.seed = o.synthetic_seed;
    check(qrec_dataset_synthetic(&c, &raw), "generating synthetic benchmark");
  } else if (o.binary_code) {
    check(qrec_dataset_binary_code(64, o.redundant ? 1 : 0, o.synthetic_seed, &raw),
          "generating binary-code catalog");
  } else {
    if (o.items.empty() || o.entities.empty() || o.ratings.empty()) {
      throw Failure{"ingest needs --items, --entities and --ratings (or --synthetic / --binary-code)"};
    }
    qrec_load_options lo{o.threshold, o.min_item, o.min_user};
    check(qrec_dataset_load(o.items.c_str(), o.entities.c_str(), o.ratings.c_str(), &lo, &raw),
          "ingesting");
  }
  DatasetPtr ds(raw, &qrec_dataset_free);
  check(qrec_dataset_write(ds.get(), o.out.c_str()), "writing " + o.out);
  print_summary(ds.get());
  std::printf("wrote %s\n", o.out.c_str());
}

void cmd_train(const Options& o) {
  auto ds = open_dataset(o);
  qrec_hparams hp;
  qrec_hparams_default(&hp);
  hp.latent_dim = o.k;
  hp.max_iters = o.iters;
  hp.lambda_u = hp.lambda_v = hp.lambda_p = hp.lambda_q = o.lambda;
  hp.seed = o.seed;
  hp.als_sweeps = o.als_sweeps;
  if (o.gamma) hp.gamma = *o.gamma;
  qrec_split split;
  qrec_split_default(&split);
  split.seed = o.split_seed;
  qrec_model* raw = nullptr;
  double loss = 0.0;
  check(qrec_train(ds.get(), &split, &hp, &raw, &loss), "training");
  ModelPtr model(raw, &qrec_model_free);
  auto path = checkpoint_path(o);
  auto tmp = path + ".tmp";
  check(qrec_model_save(model.get(), tmp.c_str()), "saving checkpoint " + path);
  fs::rename(tmp, path);
  std::printf("final loss %.6f\nwrote %s\n", loss, path.c_str());
}

void cmd_simulate(const Options& o, const CLI::App& app) {
  auto ds = open_dataset(o);
  auto model = load_model(o, ds.get());
  auto hp = online_hparams(o, model.get());
  qrec_session_options so{policy_of(o.policy), o.seed};
  std::size_t nq = o.nq.empty() ? 10 : *std::max_element(o.nq.begin(), o.nq.end());
  OwnedString text;
  if (!o.target.empty()) {
    check(qrec_simulate(model.get(), o.user.empty() ? nullptr : o.user.c_str(), o.target.c_str(),
                        nq, &so, &hp, &text.s),
          "simulating");
  } else {
    check(qrec_simulate_test(model.get(), nq, o.limit, &so, &hp, &text.s), "simulating");
  }
  auto path = fs::path(o.out) / "trajectories.tsv";
  write_file(path, echo(app, "simulate") + text.str());
  std::cout << text.str() << "wrote " << path.string() << '\n';
}

qrec_experiment_config experiment_config(const Options& o, const std::vector<std::size_t>& nq) {
  qrec_experiment_config c;
  qrec_experiment_default(&c);
  c.nq = nq.data();
  c.nq_count = nq.size();
  c.seed = o.seed;
  if (o.cold == "user") {
    c.cold = QREC_COLD_USER;
  } else if (o.cold == "item") {
    c.cold = QREC_COLD_ITEM;
  } else if (o.cold != "none") {
    throw Failure{"unknown --cold value '" + o.cold + "'"};
  }
  return c;
}

std::vector<std::size_t> experiment_nq(const Options& o) {
  return o.nq.empty() ? std::vector<std::size_t>{2, 5, 10, 15, 20} : o.nq;
}

void cmd_experiment(const Options& o, const CLI::App& app) {
  auto ds = open_dataset(o);
  auto model = load_model(o, ds.get());
  auto hp = online_hparams(o, model.get());
  auto nq = experiment_nq(o);
  auto c = experiment_config(o, nq);
  std::vector<std::string> policies =
      o.policy == "all" ? std::vector<std::string>{"qrec", "random", "sbs"}
                        : std::vector<std::string>{o.policy};
  std::vector<std::string> parts;
  for (const auto& name : policies) {
    c.policy = policy_of(name);
    OwnedString csv;
    if (o.init == "both") {
      check(qrec_ablation(model.get(), &c, &hp, &csv.s), "running ablation");
    } else if (o.init == "offline" || o.init == "random") {
      c.random_init = o.init == "random" ? 1 : 0;
      check(qrec_experiment(model.get(), &c, &hp, &csv.s), "running experiment");
    } else {
      throw Failure{"unknown --init value '" + o.init + "'"};
    }
    parts.push_back(csv.str());
  }
  auto report = echo(app, "experiment") + merge_csv(parts);
  auto path = fs::path(o.out) / "experiment.csv";
  write_file(path, report);
  print_table(report);
  std::cout << "wrote " << path.string() << '\n';
}

void cmd_sweep(const Options& o, const CLI::App& app) {
  auto ds = open_dataset(o);
  auto model = load_model(o, ds.get());
  auto hp = online_hparams(o, model.get());
  auto nq = experiment_nq(o);
  auto c = experiment_config(o, nq);
  c.policy = policy_of(o.policy);
  qrec_sweep_param param;
  if (o.param == "gamma") {
    param = QREC_SWEEP_GAMMA;
  } else if (o.param == "k") {
    param = QREC_SWEEP_LATENT_DIM;
  } else {
    throw Failure{"unknown --param value '" + o.param + "'"};
  }
  OwnedString csv;
  check(qrec_sweep(model.get(), param, o.from, o.to, o.step, &c, &hp, &csv.s), "sweeping");
  auto report = echo(app, "sweep") + csv.str();
  auto path = fs::path(o.out) / ("sweep_" + o.param + ".csv");
  write_file(path, report);
  print_table(report);
  std::cout << "wrote " << path.string() << '\n';
}

void cmd_serve(const Options& o) {
  auto ds = open_dataset(o);
  auto model = load_model(o, ds.get());
  qrec_server_config c;
  qrec_server_default(&c);
  c.host = o.host.c_str();
  c.port = o.port;
  c.nq_cap = o.nq_cap;
  c.ttl_seconds = o.ttl;
  c.grid_size = o.grid;
  c.cors_origin = o.cors.c_str();
  qrec_server* server = nullptr;
  check(qrec_server_start(model.get(), &c, &server), "starting server on " + o.host);
  std::printf("listening on http://%s:%d\n", o.host.c_str(), qrec_server_port(server));
  std::fflush(stdout);
  auto status = qrec_server_wait(server);
  qrec_server_free(server);
  check(status, "serving");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qrec: question-based recommendation"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value configuration file");
  app.allow_config_extras(CLI::config_extras_mode::error);

  Options o;
  const std::string common = "Common";
  app.add_option("--data", o.data, "Dataset directory (items.tsv, entities.tsv, ratings.tsv)")
      ->group(common);
  app.add_option("--checkpoint", o.checkpoint, "Checkpoint file (default <data>/model.qrec)")
      ->group(common);
  app.add_option("--out", o.out, "Output directory")->capture_default_str()->group(common);
  app.add_option("--seed", o.seed, "Seed")->capture_default_str()->group(common);
  app.add_option("--gamma", o.gamma, "Online affinity weight (default: the checkpoint's)")
      ->group(common);
  app.add_option("--k", o.k, "Latent dimension")->capture_default_str()->group(common);
  app.add_option("--nq", o.nq, "Question budgets, comma separated")->delimiter(',')->group(common);
  app.add_option("--als-sweeps", o.als_sweeps, "ALS sweeps per answer")
      ->capture_default_str()
      ->group(common);

  auto* ingest = app.add_subcommand("ingest", "Validate and index raw inputs");
  ingest->add_option("--items", o.items, "Items TSV");
  ingest->add_option("--entities", o.entities, "Entities TSV");
  ingest->add_option("--ratings", o.ratings, "Ratings TSV");
  ingest->add_flag("--synthetic", o.synthetic, "Generate the synthetic benchmark");
  ingest->add_flag("--binary-code", o.binary_code, "Generate the 64-item binary-code catalog");
  ingest->add_flag("--redundant", o.redundant, "Add redundant entities to the binary-code catalog");
  ingest->add_option("--synthetic-seed", o.synthetic_seed)->capture_default_str();
  ingest->add_option("--threshold", o.threshold, "Entity score threshold")->capture_default_str();
  ingest->add_option("--min-item-transactions", o.min_item)->capture_default_str();
  ingest->add_option("--min-user-transactions", o.min_user)->capture_default_str();

  auto* train = app.add_subcommand("train", "Train the offline model and write a checkpoint");
  train->add_option("--iters", o.iters, "Adam iterations")->capture_default_str();
  train->add_option("--lambda", o.lambda, "Regularization for all factors")->capture_default_str();
  train->add_option("--split-seed", o.split_seed, "Train/validation/test split seed")
      ->capture_default_str();

  auto* simulate = app.add_subcommand("simulate", "Simulated sessions with trajectories");
  simulate->add_option("--user", o.user, "User id (omit for a cold user)");
  simulate->add_option("--target", o.target, "Target item id (omit to replay the test split)");
  simulate->add_option("--limit", o.limit, "Test triples to replay (0: all)")->capture_default_str();
  simulate->add_option("--policy", o.policy)
      ->capture_default_str()
      ->check(CLI::IsMember({"qrec", "random", "sbs"}));

  auto* experiment = app.add_subcommand("experiment", "Ranking metrics over the test split");
  experiment->add_option("--policy", o.policy)
      ->capture_default_str()
      ->check(CLI::IsMember({"qrec", "random", "sbs", "all"}));
  experiment->add_option("--cold", o.cold)
      ->capture_default_str()
      ->check(CLI::IsMember({"none", "user", "item"}));
  experiment->add_option("--init", o.init, "Factors the sessions start from; both runs the ablation")
      ->capture_default_str()
      ->check(CLI::IsMember({"offline", "random", "both"}));

  auto* sweep = app.add_subcommand("sweep", "Metrics over a grid of gamma or K");
  sweep->add_option("--param", o.param)->capture_default_str()->check(CLI::IsMember({"gamma", "k"}));
  sweep->add_option("--from", o.from)->capture_default_str();
  sweep->add_option("--to", o.to)->capture_default_str();
  sweep->add_option("--step", o.step)->capture_default_str();
  sweep->add_option("--policy", o.policy)
      ->capture_default_str()
      ->check(CLI::IsMember({"qrec", "random", "sbs"}));
  sweep->add_option("--cold", o.cold)
      ->capture_default_str()
      ->check(CLI::IsMember({"none", "user", "item"}));

  auto* serve = app.add_subcommand("serve", "HTTP session API");
  serve->add_option("--host", o.host)->capture_default_str();
  serve->add_option("--port", o.port)->capture_default_str();
  serve->add_option("--nq-cap", o.nq_cap, "Questions per session")->capture_default_str();
  serve->add_option("--ttl", o.ttl, "Idle session lifetime in seconds")->capture_default_str();
  serve->add_option("--grid", o.grid, "Default recommendation count")->capture_default_str();
  serve->add_option("--cors-origin", o.cors)->capture_default_str();

  for (auto* sub : {ingest, train, simulate, experiment, sweep, serve}) sub->configurable();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*ingest) cmd_ingest(o);
    if (*train) cmd_train(o);
    if (*simulate) cmd_simulate(o, app);
    if (*experiment) cmd_experiment(o, app);
    if (*sweep) cmd_sweep(o, app);
    if (*serve) cmd_serve(o);
  } catch (const Failure& f) {
    std::fprintf(stderr, "qrec: %s\n", f.message.c_str());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "qrec: %s\n", e.what());
    return 1;
  }
  return 0;
}
