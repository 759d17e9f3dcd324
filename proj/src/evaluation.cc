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

#include "mrnet/evaluation.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "mrnet/errors.h"
#include "mrnet/rng.h"

namespace mrnet {

namespace {

constexpr double kClamp = 1e-12;

double xlogy_ratio(double p, double q) {
  return p == 0.0 ? 0.0 : p * std::log(p / q);
}

}  // namespace

double bernoulli_kl(double p, double q) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("KL: p must lie in [0, 1]");
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("KL: q must lie in [0, 1]");
  q = std::clamp(q, kClamp, 1.0 - kClamp);
  const double d = xlogy_ratio(p, q) + xlogy_ratio(1.0 - p, 1.0 - q);
  // Rounding can leave a tiny negative residue when p == q.
  return std::max(d, 0.0);
}

namespace {

struct LossAccumulator {
  double kl = 0.0;
  double sq = 0.0;
  std::size_t wrong = 0;
  std::size_t count = 0;

  void add(double phi_hat, double phi_star) {
    const double m_hat = logistic(phi_hat);
    const double m_star = logistic(phi_star);
    kl += bernoulli_kl(m_star, m_hat);
    const double diff = phi_hat - phi_star;
    sq += diff * diff;
    // sgn(x) = 1 for x >= 0.
    wrong += (m_hat >= 0.5) != (m_star >= 0.5);
    ++count;
  }

  EvalReport report() const {
    EvalReport r;
    r.n_evaluated = count;
    if (count == 0) return r;
    const double n = static_cast<double>(count);
    r.avg_kl = kl / n;
    r.mse_phi = sq / n;
    r.link_err = static_cast<double>(wrong) / n;
    return r;
  }
};

void check_pair(const ScoreModel& model, const ModelParams& fitted,
                const ModelParams& truth) {
  check_layout(model, fitted);
  check_layout(model, truth);
  if (fitted.n_entities() != truth.n_entities() ||
      fitted.n_relations() != truth.n_relations()) {
    throw ShapeError("fitted and true parameters describe different networks");
  }
}

double row_score(const ScoreModel& model, const ModelParams& p,
                 const Triple& t) {
  return score_rows(model.kind, p.entity(t.head), p.entity(t.tail),
                    p.relation(t.rel));
}

}  // namespace

EvalReport evaluate_losses(const ScoreModel& model, const ModelParams& fitted,
                           const ModelParams& truth) {
  check_pair(model, fitted, truth);
  LossAccumulator acc;
  Triple t;
  for (std::size_t i = 0; i < truth.n_entities(); ++i) {
    t.head = static_cast<std::uint32_t>(i);
    for (std::size_t j = 0; j < truth.n_entities(); ++j) {
      t.tail = static_cast<std::uint32_t>(j);
      for (std::size_t k = 0; k < truth.n_relations(); ++k) {
        t.rel = static_cast<std::uint32_t>(k);
        acc.add(row_score(model, fitted, t), row_score(model, truth, t));
      }
    }
  }
  return acc.report();
}

EvalReport evaluate_losses(const ScoreModel& model, const ModelParams& fitted,
                           const ModelParams& truth,
                           std::span<const Triple> edges) {
  check_pair(model, fitted, truth);
  LossAccumulator acc;
  for (const Triple& t : edges) {
    check_edge(truth, t);
    acc.add(row_score(model, fitted, t), row_score(model, truth, t));
  }
  return acc.report();
}

std::size_t TripleHash::operator()(const Triple& t) const {
  const std::uint64_t a = (static_cast<std::uint64_t>(t.head) << 32) | t.tail;
  return static_cast<std::size_t>(mix64(a ^ mix64(t.rel)));
}

KnownTriples::KnownTriples(std::span<const Triple> triples) {
  set_.reserve(triples.size());
  for (const Triple& t : triples) set_.insert(t);
}

double rank_edge_with(const std::function<double(const Triple&)>& score_of,
                      const NetworkShape& shape, const Triple& target,
                      Slot slot, const KnownTriples& valid) {
  if (!shape.contains(target)) throw ShapeError("ranking target outside network");
  if (!valid.contains(target)) {
    throw DomainError("ranking target is not a valid triple");
  }
  const double target_score = score_of(target);
  const std::size_t width =
      slot == Slot::kRelation ? shape.n_relations : shape.n_entities;
  std::size_t greater = 0;
  std::size_t ties = 0;
  Triple c = target;
  for (std::size_t v = 0; v < width; ++v) {
    const auto idx = static_cast<std::uint32_t>(v);
    switch (slot) {
      case Slot::kHead:
        c.head = idx;
        break;
      case Slot::kTail:
        c.tail = idx;
        break;
      case Slot::kRelation:
        c.rel = idx;
        break;
    }
    if (c == target || valid.contains(c)) continue;
    const double s = score_of(c);
    if (s > target_score) {
      ++greater;
    } else if (s == target_score) {
      ++ties;
    }
  }
  return 1.0 + static_cast<double>(greater) + 0.5 * static_cast<double>(ties);
}

double rank_edge(const ScoreModel& model, const ModelParams& fitted,
                 const Triple& target, Slot slot, const KnownTriples& valid) {
  check_layout(model, fitted);
  check_edge(fitted, target);
  const NetworkShape shape{fitted.n_entities(), fitted.n_relations(), 1.0};
  return rank_edge_with(
      [&](const Triple& t) { return row_score(model, fitted, t); }, shape,
      target, slot, valid);
}

RankReport summarize_ranks(std::vector<TripleRanks> ranks,
                           std::span<const int> hits_qs) {
  if (ranks.empty()) throw DomainError("rank report needs at least one triple");
  RankReport r;
  const double v = static_cast<double>(ranks.size());
  double mr_e = 0.0, mrr_e = 0.0, mr_r = 0.0, mrr_r = 0.0;
  for (const TripleRanks& t : ranks) {
    mr_e += t.head + t.tail;
    mrr_e += 1.0 / t.head + 1.0 / t.tail;
    mr_r += t.relation;
    mrr_r += 1.0 / t.relation;
  }
  r.mr_entity = mr_e / (2.0 * v);
  r.mrr_entity = mrr_e / (2.0 * v);
  r.mr_relation = mr_r / v;
  r.mrr_relation = mrr_r / v;
  for (int q : hits_qs) {
    std::size_t he = 0, hr = 0;
    for (const TripleRanks& t : ranks) {
      he += (t.head <= q) + (t.tail <= q);
      hr += t.relation <= q;
    }
    r.hits_entity[q] = static_cast<double>(he) / (2.0 * v);
    r.hits_relation[q] = static_cast<double>(hr) / v;
  }
  r.ranks = std::move(ranks);
  return r;
}

RankReport rank_report(const ScoreModel& model, const ModelParams& fitted,
                       std::span<const Triple> test_triples,
                       const KnownTriples& valid, std::span<const int> hits_qs) {
  if (test_triples.empty()) throw DomainError("no test triples to rank");
  std::vector<TripleRanks> ranks;
  ranks.reserve(test_triples.size());
  for (const Triple& t : test_triples) {
    TripleRanks r;
    r.head = rank_edge(model, fitted, t, Slot::kHead, valid);
    r.tail = rank_edge(model, fitted, t, Slot::kTail, valid);
    r.relation = rank_edge(model, fitted, t, Slot::kRelation, valid);
    ranks.push_back(r);
  }
  return summarize_ranks(std::move(ranks), hits_qs);
}

double random_entity_hits(const NetworkShape& shape,
                          std::span<const Triple> test_triples,
                          const KnownTriples& valid, int q) {
  if (test_triples.empty()) throw DomainError("no test triples");
  double total = 0.0;
  for (const Triple& target : test_triples) {
    for (Slot slot : {Slot::kHead, Slot::kTail}) {
      std::size_t competitors = 0;
      Triple c = target;
      for (std::size_t v = 0; v < shape.n_entities; ++v) {
        (slot == Slot::kHead ? c.head : c.tail) = static_cast<std::uint32_t>(v);
        if (c != target && !valid.contains(c)) ++competitors;
      }
      const double size = static_cast<double>(competitors + 1);
      total += std::min(static_cast<double>(std::max(q, 0)), size) / size;
    }
  }
  return total / (2.0 * static_cast<double>(test_triples.size()));
}

}  // namespace mrnet
