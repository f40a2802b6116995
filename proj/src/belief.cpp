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

#include "qrec/belief.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace qrec {

std::string_view to_string(Answer answer) {
  switch (answer) {
    case Answer::yes: return "yes";
    case Answer::no: return "no";
    case Answer::not_sure: return "not_sure";
  }
  return "?";
}

Answer parse_answer(std::string_view text) {
  if (text == "yes") return Answer::yes;
  if (text == "no") return Answer::no;
  if (text == "not_sure" || text == "not sure") return Answer::not_sure;
  throw Error(ErrorCode::invalid_argument, "invalid answer '" + std::string(text) + "'");
}

std::vector<double> init_alpha(std::span<const std::uint32_t> ranking) {
  std::vector<double> alpha(ranking.size(), 0.0);
  for (std::size_t pos = 0; pos < ranking.size(); ++pos) {
    auto d = ranking[pos];
    if (d >= ranking.size() || alpha[d] != 0.0) {
      throw Error(ErrorCode::invalid_argument, "ranking is not a permutation of the items");
    }
    alpha[d] = 1.0 / static_cast<double>(pos + 1);
  }
  return alpha;
}

std::vector<double> uniform_alpha(std::size_t num_items, double concentration) {
  if (!(concentration > 0)) throw Error(ErrorCode::invalid_argument, "concentration must be > 0");
  return std::vector<double>(num_items, concentration);
}

std::vector<double> preference_mean(std::span<const double> alpha, std::span<const int> affinity) {
  if (alpha.size() != affinity.size()) {
    throw Error(ErrorCode::invalid_argument, "alpha and affinity lengths differ");
  }
  std::vector<double> pi(alpha.size());
  double total = 0.0;
  for (std::size_t d = 0; d < alpha.size(); ++d) {
    pi[d] = alpha[d] + static_cast<double>(affinity[d]);
    total += pi[d];
  }
  for (auto& v : pi) v /= total;
  return pi;
}

CandidateSet CandidateSet::all(std::size_t num_items) {
  CandidateSet c;
  c.members_.resize(num_items);
  for (std::size_t d = 0; d < num_items; ++d) c.members_[d] = static_cast<std::uint32_t>(d);
  return c;
}

CandidateSet::CandidateSet(std::vector<std::uint32_t> members) : members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

bool CandidateSet::contains(std::uint32_t item) const {
  return std::binary_search(members_.begin(), members_.end(), item);
}

double gbs_objective(std::span<const double> pi, const CandidateSet& candidates,
                     const ItemCorpus& corpus, std::size_t entity) {
  double s = 0.0;
  for (auto d : candidates.members()) s += corpus.contains(d, entity) ? pi[d] : -pi[d];
  return std::abs(s);
}

std::size_t select_question(std::span<const double> pi, const CandidateSet& candidates,
                            const QuestionPool& pool, const ItemCorpus& corpus) {
  if (pool.empty()) throw Error(ErrorCode::no_questions_left, "question pool is exhausted");
  if (candidates.empty()) throw Error(ErrorCode::invalid_argument, "candidate set is empty");
  if (pi.size() != corpus.num_items()) {
    throw Error(ErrorCode::invalid_argument, "preference vector length differs from item count");
  }
  std::size_t best = pool.capacity();
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < pool.capacity(); ++e) {
    if (!pool.contains(e)) continue;
    double value = gbs_objective(pi, candidates, corpus, e);
    if (value < best_value) {
      best_value = value;
      best = e;
    }
  }
  return best;
}

PruneResult prune_candidates(const CandidateSet& candidates, std::size_t entity, Answer answer,
                             const ItemCorpus& corpus) {
  if (entity >= corpus.num_entities()) {
    throw Error(ErrorCode::invalid_argument, "entity index out of range");
  }
  if (answer == Answer::not_sure) return {candidates, false};
  const bool want = answer == Answer::yes;
  std::vector<std::uint32_t> kept;
  kept.reserve(candidates.size());
  for (auto d : candidates.members()) {
    if (corpus.contains(d, entity) == want) kept.push_back(d);
  }
  if (kept.empty()) return {candidates, true};
  return {CandidateSet(std::move(kept)), false};
}

}  // namespace qrec
