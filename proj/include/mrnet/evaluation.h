// Copyright 2026 The mrnet Authors.
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

#ifndef MRNET_EVALUATION_H_
#define MRNET_EVALUATION_H_

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <unordered_set>
#include <vector>

#include "mrnet/model.h"

namespace mrnet {

// D(p || q) for Bernoulli laws. q is clamped to [1e-12, 1 - 1e-12] first;
// 0 log 0 = 0. Throws DomainError for p or q outside [0, 1].
double bernoulli_kl(double p, double q);

struct EvalReport {
  double avg_kl = 0.0;    // mean D(M* || M_hat)
  double mse_phi = 0.0;   // mean (phi_hat - phi*)^2
  double link_err = 0.0;  // mean 1{sgn(M_hat - 1/2) != sgn(M* - 1/2)}
  std::size_t n_evaluated = 0;
};

// Averages over every edge of Lambda.
EvalReport evaluate_losses(const ScoreModel& model, const ModelParams& fitted,
                           const ModelParams& truth);
// Averages over the listed edges (repeats count repeatedly).
EvalReport evaluate_losses(const ScoreModel& model, const ModelParams& fitted,
                           const ModelParams& truth,
                           std::span<const Triple> edges);

struct TripleHash {
  std::size_t operator()(const Triple& t) const;
};

// The set of triples known to be valid; used to filter ranking candidates.
class KnownTriples {
 public:
  KnownTriples() = default;
  explicit KnownTriples(std::span<const Triple> triples);
  void insert(const Triple& t) { set_.insert(t); }
  bool contains(const Triple& t) const { return set_.count(t) != 0; }
  std::size_t size() const { return set_.size(); }

 private:
  std::unordered_set<Triple, TripleHash> set_;
};

enum class Slot { kHead, kTail, kRelation };

// Filtered rank of `target` within the slice that varies `slot`. Candidates
// are the target plus every slice member absent from `valid`;
// rank = 1 + #{score > target} + #{other candidates with equal score} / 2.
// Throws DomainError if `valid` does not contain the target.
double rank_edge(const ScoreModel& model, const ModelParams& fitted,
                 const Triple& target, Slot slot, const KnownTriples& valid);

// Same rule, with scores supplied by `score_of` instead of a fitted model.
double rank_edge_with(const std::function<double(const Triple&)>& score_of,
                      const NetworkShape& shape, const Triple& target,
                      Slot slot, const KnownTriples& valid);

struct TripleRanks {
  double head = 1.0;
  double tail = 1.0;
  double relation = 1.0;
};

struct RankReport {
  double mr_entity = 1.0;
  double mrr_entity = 1.0;
  std::map<int, double> hits_entity;
  double mr_relation = 1.0;
  double mrr_relation = 1.0;
  std::map<int, double> hits_relation;
  std::vector<TripleRanks> ranks;  // one per test triple, in input order
};

RankReport rank_report(const ScoreModel& model, const ModelParams& fitted,
                       std::span<const Triple> test_triples,
                       const KnownTriples& valid, std::span<const int> hits_qs);

// Aggregates per-triple ranks with the MR / MRR / Hits@q formulas.
RankReport summarize_ranks(std::vector<TripleRanks> ranks,
                           std::span<const int> hits_qs);

// Expected entity Hits@q when every candidate score is i.i.d. continuous:
// a target with c competitors has rank uniform on {1..c+1}.
double random_entity_hits(const NetworkShape& shape,
                          std::span<const Triple> test_triples,
                          const KnownTriples& valid, int q);

}  // namespace mrnet

#endif  // MRNET_EVALUATION_H_
