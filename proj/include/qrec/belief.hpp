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
#include "qrec/corpus.hpp"

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace qrec {

enum class Answer { yes, no, not_sure };

std::string_view to_string(Answer answer);
// Accepts "yes", "no", "not_sure" (also "not sure"); throws invalid_argument.
Answer parse_answer(std::string_view text);

// Dirichlet parameter from an item ranking: alpha[d] = 1 / (rank(d) + 1)
// with zero-based rank, so the top item gets 1.
std::vector<double> init_alpha(std::span<const std::uint32_t> ranking);

// Rank-independent prior used by the sequential Bayesian search baseline.
std::vector<double> uniform_alpha(std::size_t num_items, double concentration = 1.0);

// Mean of Dir(alpha + Y).
std::vector<double> preference_mean(std::span<const double> alpha, std::span<const int> affinity);

// Items still consistent with every answer.
class CandidateSet {
 public:
  static CandidateSet all(std::size_t num_items);
  explicit CandidateSet(std::vector<std::uint32_t> members);  // sorted, deduplicated

  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  bool contains(std::uint32_t item) const;
  std::span<const std::uint32_t> members() const { return members_; }

  bool operator==(const CandidateSet&) const = default;

 private:
  CandidateSet() = default;
  std::vector<std::uint32_t> members_;
};

// |sum_{d in C} (2*[e in d] - 1) * pi[d]|, summed over C in ascending item
// order. pi is used as given, not renormalized over C.
double gbs_objective(std::span<const double> pi, const CandidateSet& candidates,
                     const ItemCorpus& corpus, std::size_t entity);

// Entity from the pool minimizing gbs_objective; ties go to the smallest
// index. Throws no_questions_left on an empty pool.
std::size_t select_question(std::span<const double> pi, const CandidateSet& candidates,
                            const QuestionPool& pool, const ItemCorpus& corpus);

struct PruneResult {
  CandidateSet candidates;
  bool contradiction = false;
};

// yes keeps members containing the entity, no keeps the rest, not_sure keeps
// everything. An empty result keeps the previous set and flags a
// contradiction.
PruneResult prune_candidates(const CandidateSet& candidates, std::size_t entity, Answer answer,
                             const ItemCorpus& corpus);

}  // namespace qrec
