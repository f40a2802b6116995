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

#include "qrec/factorization.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace qrec {

void HyperParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::invalid_argument, what);
  };
  require(latent_dim >= 1 && latent_dim <= kMaxLatentDim, "latent_dim must be in [1, 32]");
  require(lambda_u > 0 && lambda_v > 0 && lambda_p > 0 && lambda_q > 0,
          "regularizers must be positive");
  require(gamma >= 0 && std::isfinite(gamma), "gamma must be a finite non-negative number");
  require(max_iters >= 0, "max_iters must be non-negative");
  require(adam_lr > 0 && adam_beta1 >= 0 && adam_beta1 < 1 && adam_beta2 >= 0 && adam_beta2 < 1 &&
              adam_eps > 0,
          "invalid Adam constants");
  require(init_stddev >= 0, "init_stddev must be non-negative");
  require(als_sweeps >= 1, "als_sweeps must be at least 1");
}

bool LatentModel::all_finite() const {
  return U.allFinite() && V.allFinite() && p.allFinite() && q.allFinite();
}

LatentModel LatentModel::zeros(std::size_t users, std::size_t items, int latent_dim) {
  LatentModel m;
  m.U = Matrix::Zero(static_cast<Eigen::Index>(users), latent_dim);
  m.V = Matrix::Zero(static_cast<Eigen::Index>(items), latent_dim);
  m.p = Vector::Ones(latent_dim);
  m.q = Vector::Ones(latent_dim);
  return m;
}

LatentModel LatentModel::initial(std::size_t users, std::size_t items, const HyperParams& hp) {
  auto m = zeros(users, items, hp.latent_dim);
  std::mt19937_64 rng(hp.seed);
  std::normal_distribution<double> gauss(0.0, hp.init_stddev);
  for (Eigen::Index i = 0; i < m.U.size(); ++i) m.U.data()[i] = gauss(rng);
  for (Eigen::Index i = 0; i < m.V.size(); ++i) m.V.data()[i] = gauss(rng);
  return m;
}

namespace {

void check_shapes(const LatentModel& model, const RatingMatrix& ratings,
                  std::optional<AffinityRow> affinity) {
  const auto k = model.p.size();
  if (k < 1 || model.q.size() != k || model.U.cols() != k || model.V.cols() != k) {
    throw Error(ErrorCode::invalid_argument, "latent dimension mismatch");
  }
  if (model.num_users() != ratings.num_users() || model.num_items() != ratings.num_items()) {
    throw Error(ErrorCode::invalid_argument, "model and rating matrix dimensions differ");
  }
  if (affinity) {
    if (affinity->user >= model.num_users()) {
      throw Error(ErrorCode::invalid_argument, "affinity user out of range");
    }
    if (affinity->values.size() != model.num_items()) {
      throw Error(ErrorCode::invalid_argument, "affinity row length differs from item count");
    }
  }
}

double rating_prediction(const LatentModel& m, std::size_t i, std::size_t j) {
  return (m.p.array() * m.U.row(static_cast<Eigen::Index>(i)).transpose().array() *
          m.V.row(static_cast<Eigen::Index>(j)).transpose().array())
      .sum();
}

double affinity_prediction(const LatentModel& m, std::size_t i, std::size_t j) {
  return (m.q.array() * m.U.row(static_cast<Eigen::Index>(i)).transpose().array() *
          m.V.row(static_cast<Eigen::Index>(j)).transpose().array())
      .sum();
}

}  // namespace

double loss(const LatentModel& model, const RatingMatrix& ratings, const HyperParams& hp,
            std::optional<AffinityRow> affinity) {
  check_shapes(model, ratings, affinity);
  double fit = 0.0;
  for (const auto& r : ratings.triples()) {
    double e = r.value - rating_prediction(model, r.user, r.item);
    fit += e * e;
  }
  double feedback = 0.0;
  if (affinity) {
    for (std::size_t j = 0; j < model.num_items(); ++j) {
      double e = affinity->values[j] - affinity_prediction(model, affinity->user, j);
      feedback += e * e;
    }
  }
  return 0.5 * fit + 0.5 * hp.gamma * feedback + 0.5 * hp.lambda_u * model.U.squaredNorm() +
         0.5 * hp.lambda_v * model.V.squaredNorm() + 0.5 * hp.lambda_p * model.p.squaredNorm() +
         0.5 * hp.lambda_q * model.q.squaredNorm();
}

Gradients grad_loss(const LatentModel& model, const RatingMatrix& ratings, const HyperParams& hp,
                    std::optional<AffinityRow> affinity) {
  check_shapes(model, ratings, affinity);
  Gradients g;
  g.U = hp.lambda_u * model.U;
  g.V = hp.lambda_v * model.V;
  g.p = hp.lambda_p * model.p;

  const auto& p = model.p;
  for (const auto& r : ratings.triples()) {
    auto u = model.U.row(r.user);
    auto v = model.V.row(r.item);
    double e = r.value - rating_prediction(model, r.user, r.item);
    g.U.row(r.user).array() -= e * p.transpose().array() * v.array();
    g.V.row(r.item).array() -= e * p.transpose().array() * u.array();
    g.p.array() -= e * (u.array() * v.array()).transpose();
  }
  if (affinity && hp.gamma != 0.0) {
    const auto i = static_cast<Eigen::Index>(affinity->user);
    const auto& q = model.q;
    for (std::size_t j = 0; j < model.num_items(); ++j) {
      auto jj = static_cast<Eigen::Index>(j);
      double e = affinity->values[j] - affinity_prediction(model, affinity->user, j);
      g.U.row(i).array() -= hp.gamma * e * q.transpose().array() * model.V.row(jj).array();
      g.V.row(jj).array() -= hp.gamma * e * q.transpose().array() * model.U.row(i).array();
    }
  }
  return g;
}

LatentModel train_offline(const RatingMatrix& ratings, const HyperParams& hp, TrainReport* report) {
  hp.validate();
  if (ratings.num_users() == 0 || ratings.num_items() == 0) {
    throw Error(ErrorCode::invalid_argument, "training needs at least one user and one item");
  }
  auto model = LatentModel::initial(ratings.num_users(), ratings.num_items(), hp);

  Matrix mU = Matrix::Zero(model.U.rows(), model.U.cols()), vU = mU;
  Matrix mV = Matrix::Zero(model.V.rows(), model.V.cols()), vV = mV;
  Vector mp = Vector::Zero(model.p.size()), vp = mp;

  std::vector<double> history;
  history.reserve(static_cast<std::size_t>(hp.max_iters) + 1);
  auto record = [&](double value) {
    if (!std::isfinite(value)) {
      throw Error(ErrorCode::numeric, "training diverged: loss is " + std::to_string(value) +
                                          " after " + std::to_string(history.size()) +
                                          " iterations");
    }
    history.push_back(value);
  };

  double b1t = 1.0, b2t = 1.0;
  for (int it = 0; it < hp.max_iters; ++it) {
    record(loss(model, ratings, hp));
    auto g = grad_loss(model, ratings, hp);
    b1t *= hp.adam_beta1;
    b2t *= hp.adam_beta2;
    const double c1 = 1.0 - b1t, c2 = 1.0 - b2t;
    auto step = [&](auto& param, auto& m, auto& v, const auto& grad) {
      m = hp.adam_beta1 * m + (1.0 - hp.adam_beta1) * grad;
      v.array() = hp.adam_beta2 * v.array() + (1.0 - hp.adam_beta2) * grad.array().square();
      param.array() -=
          hp.adam_lr * (m.array() / c1) / ((v.array() / c2).sqrt() + hp.adam_eps);
    };
    step(model.U, mU, vU, g.U);
    step(model.V, mV, vV, g.V);
    step(model.p, mp, vp, g.p);
  }
  record(loss(model, ratings, hp));

  if (report) {
    report->tail_non_increasing = true;
    std::size_t n = history.size();
    for (std::size_t t = n > 11 ? n - 11 : 0; t + 1 < n; ++t) {
      if (history[t + 1] > history[t] * 1.01) report->tail_non_increasing = false;
    }
    report->loss_history = std::move(history);
  }
  return model;
}

double score(const LatentModel& model, std::size_t user, std::size_t item) {
  if (user >= model.num_users() || item >= model.num_items()) {
    throw Error(ErrorCode::invalid_argument, "score index out of range");
  }
  return rating_prediction(model, user, item);
}

std::vector<std::uint32_t> rank_by_scores(std::span<const double> scores) {
  std::vector<std::uint32_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0U);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return scores[a] > scores[b]; });
  return order;
}

std::vector<std::uint32_t> rank_items(const LatentModel& model, std::size_t user) {
  if (user >= model.num_users()) throw Error(ErrorCode::invalid_argument, "user out of range");
  Vector pu = model.p.cwiseProduct(model.U.row(static_cast<Eigen::Index>(user)).transpose());
  Vector s = model.V * pu;
  return rank_by_scores(std::span<const double>(s.data(), static_cast<std::size_t>(s.size())));
}

namespace detail {

Vector solve_spd(const Eigen::MatrixXd& a, const Vector& b) {
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  Vector x;
  if (llt.info() == Eigen::Success) {
    x = llt.solve(b);
  } else {
    x = a.ldlt().solve(b);
  }
  double residual = (a * x - b).norm();
  if (!x.allFinite() || residual > 1e-8 * std::max(1.0, b.norm())) {
    throw Error(ErrorCode::numeric,
                "closed-form solve failed (residual " + std::to_string(residual) + ")");
  }
  return x;
}

}  // namespace detail

Vector update_user_factor(const LatentModel& model, const RatingMatrix& ratings,
                          std::span<const double> affinity, std::size_t user,
                          const HyperParams& hp) {
  check_shapes(model, ratings, AffinityRow{user, affinity});
  const int k = model.latent_dim();
  Eigen::MatrixXd a = hp.lambda_u * Eigen::MatrixXd::Identity(k, k);
  Vector b = Vector::Zero(k);
  const auto triples = ratings.triples();
  for (auto t : ratings.user_entries(user)) {
    const auto& r = triples[t];
    Vector vp = model.V.row(r.item).transpose().cwiseProduct(model.p);
    a.noalias() += vp * vp.transpose();
    b += r.value * vp;
  }
  if (hp.gamma != 0.0) {
    for (std::size_t j = 0; j < model.num_items(); ++j) {
      Vector vq = model.V.row(static_cast<Eigen::Index>(j)).transpose().cwiseProduct(model.q);
      a.noalias() += hp.gamma * vq * vq.transpose();
      b += hp.gamma * affinity[j] * vq;
    }
  }
  return detail::solve_spd(a, b);
}

Matrix update_item_factors(const LatentModel& model, const RatingMatrix& ratings,
                           std::span<const double> affinity, std::size_t user,
                           const HyperParams& hp) {
  check_shapes(model, ratings, AffinityRow{user, affinity});
  const int k = model.latent_dim();
  Vector uq = model.U.row(static_cast<Eigen::Index>(user)).transpose().cwiseProduct(model.q);
  Eigen::MatrixXd feedback_gram = hp.gamma * uq * uq.transpose();
  Matrix out(model.V.rows(), model.V.cols());
  const auto triples = ratings.triples();
  for (std::size_t j = 0; j < model.num_items(); ++j) {
    Eigen::MatrixXd a = hp.lambda_v * Eigen::MatrixXd::Identity(k, k) + feedback_gram;
    Vector b = hp.gamma * affinity[j] * uq;
    for (auto t : ratings.item_entries(j)) {
      const auto& r = triples[t];
      Vector up = model.U.row(r.user).transpose().cwiseProduct(model.p);
      a.noalias() += up * up.transpose();
      b += r.value * up;
    }
    out.row(static_cast<Eigen::Index>(j)) = detail::solve_spd(a, b).transpose();
  }
  return out;
}

LatentModel als_sweep(const LatentModel& model, const RatingMatrix& ratings,
                      std::span<const double> affinity, std::size_t user, const HyperParams& hp,
                      int sweeps) {
  if (sweeps < 1) throw Error(ErrorCode::invalid_argument, "sweeps must be at least 1");
  LatentModel out = model;
  for (int s = 0; s < sweeps; ++s) {
    out.U.row(static_cast<Eigen::Index>(user)) =
        update_user_factor(out, ratings, affinity, user, hp).transpose();
    out.V = update_item_factors(out, ratings, affinity, user, hp);
  }
  return out;
}

}  // namespace qrec
