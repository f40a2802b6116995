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

#include "qrec/common.hpp"
#include "qrec/ratings.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace qrec {

inline constexpr int kMaxLatentDim = 32;

struct HyperParams {
  int latent_dim = 3;
  double lambda_u = 0.1;
  double lambda_v = 0.1;
  double lambda_p = 0.1;
  double lambda_q = 0.1;
  // Weight of the session affinity term; 0 disables online feedback.
  double gamma = 0.5;
  int max_iters = 100;
  double adam_lr = 0.01;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double init_stddev = 0.1;
  std::uint64_t seed = 42;
  // ALS alternations per answered question.
  int als_sweeps = 1;

  // Throws invalid_argument when a field is out of range.
  void validate() const;
};

// The QMF state: rating score p.(u_i o v_j), affinity score q.(u_i o v_j).
struct LatentModel {
  Matrix U;  // N x K
  Matrix V;  // M x K
  Vector p;
  Vector q;

  int latent_dim() const { return static_cast<int>(p.size()); }
  std::size_t num_users() const { return static_cast<std::size_t>(U.rows()); }
  std::size_t num_items() const { return static_cast<std::size_t>(V.rows()); }
  bool all_finite() const;

  static LatentModel zeros(std::size_t users, std::size_t items, int latent_dim);
  // U, V ~ N(0, init_stddev^2) from hp.seed; p and q start at ones.
  static LatentModel initial(std::size_t users, std::size_t items, const HyperParams& hp);

  bool operator==(const LatentModel& o) const {
    return U == o.U && V == o.V && p == o.p && q == o.q;
  }
};

// One user's dense online affinity row (Y_i).
struct AffinityRow {
  std::size_t user = 0;
  std::span<const double> values;
};

struct Gradients {
  Matrix U;
  Matrix V;
  Vector p;
};

// Negative log posterior. The affinity term only covers the active user's row.
double loss(const LatentModel& model, const RatingMatrix& ratings, const HyperParams& hp,
            std::optional<AffinityRow> affinity = std::nullopt);

// Analytic gradient of loss() with respect to U, V and p. Without an affinity
// row this is the offline objective.
Gradients grad_loss(const LatentModel& model, const RatingMatrix& ratings, const HyperParams& hp,
                    std::optional<AffinityRow> affinity = std::nullopt);

struct TrainReport {
  std::vector<double> loss_history;  // loss before each step, then final
  bool tail_non_increasing = true;   // last 10 steps within 1%
};

// Full-batch Adam on the gamma = 0 objective; q stays at ones.
LatentModel train_offline(const RatingMatrix& ratings, const HyperParams& hp,
                          TrainReport* report = nullptr);

double score(const LatentModel& model, std::size_t user, std::size_t item);

// Items by descending score; equal scores keep ascending item index.
std::vector<std::uint32_t> rank_by_scores(std::span<const double> scores);
std::vector<std::uint32_t> rank_items(const LatentModel& model, std::size_t user);

// Closed-form minimizer of loss() over u_i with everything else fixed. The
// rating terms run over items the user rated; the affinity terms over all
// items.
Vector update_user_factor(const LatentModel& model, const RatingMatrix& ratings,
                          std::span<const double> affinity, std::size_t user,
                          const HyperParams& hp);

// Closed-form minimizer of loss() over every v_j with U fixed; each item gets
// the affinity term of the session user.
Matrix update_item_factors(const LatentModel& model, const RatingMatrix& ratings,
                           std::span<const double> affinity, std::size_t user,
                           const HyperParams& hp);

// `sweeps` alternations of update_user_factor (row `user` only) and
// update_item_factors.
LatentModel als_sweep(const LatentModel& model, const RatingMatrix& ratings,
                      std::span<const double> affinity, std::size_t user, const HyperParams& hp,
                      int sweeps = 1);

namespace detail {
// Symmetric positive-definite K x K solve; throws numeric if the relative
// residual exceeds 1e-8.
Vector solve_spd(const Eigen::MatrixXd& a, const Vector& b);
}  // namespace detail

}  // namespace qrec
