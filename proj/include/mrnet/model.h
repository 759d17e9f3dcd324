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

#ifndef MRNET_MODEL_H_
#define MRNET_MODEL_H_

// Parameter space, score functions and edge probabilities for latent
// multi-relational network models.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mrnet {

// Edge (head, tail, relation) of the network. Self-loops are legal.
struct Triple {
  std::uint32_t head = 0;
  std::uint32_t tail = 0;
  std::uint32_t rel = 0;

  friend auto operator<=>(const Triple&, const Triple&) = default;
};

struct NetworkShape {
  std::size_t n_entities = 1;
  std::size_t n_relations = 1;
  double obs_rate = 1.0;

  // |Lambda| = N^2 K.
  std::uint64_t n_edges() const {
    return static_cast<std::uint64_t>(n_entities) * n_entities * n_relations;
  }
  // n = gamma N^2 K.
  double expected_observations() const {
    return obs_rate * static_cast<double>(n_edges());
  }
  bool contains(const Triple& t) const {
    return t.head < n_entities && t.tail < n_entities && t.rel < n_relations;
  }
  // Row-major flat index over [N] x [N] x [K].
  std::uint64_t edge_index(const Triple& t) const {
    return (static_cast<std::uint64_t>(t.head) * n_entities + t.tail) *
               n_relations +
           t.rel;
  }
  Triple triple_at(std::uint64_t index) const;

  // Throws DomainError unless N >= 1, K >= 1 and gamma in [0, 1].
  void validate() const;
};

enum class ScoreKind { kDistance, kBilinear, kCombinedQuadratic };

std::string_view to_string(ScoreKind kind);
// Accepts "distance", "bilinear", "combined" (and "combined_quadratic").
ScoreKind parse_score_kind(std::string_view name);

struct ScoreModel {
  ScoreKind kind = ScoreKind::kDistance;
  std::size_t latent_dim = 1;

  std::size_t entity_dim() const { return latent_dim; }
  // Distance packs (a_k, b_k) with b_k last; CombinedQuadratic packs
  // (a_k, b_k) as two halves.
  std::size_t relation_dim() const {
    switch (kind) {
      case ScoreKind::kDistance:
        return latent_dim + 1;
      case ScoreKind::kBilinear:
        return latent_dim;
      case ScoreKind::kCombinedQuadratic:
        return 2 * latent_dim;
    }
    return 0;
  }
  // m = N d_E + K d_R.
  std::size_t dimension(std::size_t n_entities, std::size_t n_relations) const {
    return n_entities * entity_dim() + n_relations * relation_dim();
  }

  friend bool operator==(const ScoreModel&, const ScoreModel&) = default;
};

// The full parameter vector x = (theta_1..theta_N, w_1..w_K) stored flat,
// entities first. Every row is meant to lie in the ball of radius `radius`;
// `validate()` checks this, the mutable accessors do not.
class ModelParams {
 public:
  ModelParams() = default;
  ModelParams(std::size_t n_entities, std::size_t entity_dim,
              std::size_t n_relations, std::size_t relation_dim,
              double radius);
  // Zero parameters laid out for `model`.
  static ModelParams zeros(const ScoreModel& model, std::size_t n_entities,
                           std::size_t n_relations, double radius);

  std::size_t n_entities() const { return n_entities_; }
  std::size_t n_relations() const { return n_relations_; }
  std::size_t entity_dim() const { return entity_dim_; }
  std::size_t relation_dim() const { return relation_dim_; }
  std::size_t dimension() const { return values_.size(); }
  std::size_t entity_offset(std::size_t i) const { return i * entity_dim_; }
  std::size_t relation_offset(std::size_t k) const {
    return n_entities_ * entity_dim_ + k * relation_dim_;
  }

  double radius() const { return radius_; }
  void set_radius(double radius) { radius_ = radius; }

  std::span<const double> entity(std::size_t i) const {
    return {values_.data() + entity_offset(i), entity_dim_};
  }
  std::span<double> entity(std::size_t i) {
    return {values_.data() + entity_offset(i), entity_dim_};
  }
  std::span<const double> relation(std::size_t k) const {
    return {values_.data() + relation_offset(k), relation_dim_};
  }
  std::span<double> relation(std::size_t k) {
    return {values_.data() + relation_offset(k), relation_dim_};
  }
  std::span<const double> flat() const { return values_; }
  std::span<double> flat() { return values_; }

  // Throws DomainError on non-finite entries or rows outside the ball
  // (relative slack 1e-12 for rounding after projection).
  void validate() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;

 private:
  std::size_t n_entities_ = 0;
  std::size_t entity_dim_ = 0;
  std::size_t n_relations_ = 0;
  std::size_t relation_dim_ = 0;
  double radius_ = 1.0;
  std::vector<double> values_;
};

struct ScoreGradient {
  std::vector<double> head;  // d phi / d theta_head
  std::vector<double> tail;  // d phi / d theta_tail
  std::vector<double> rel;   // d phi / d w_rel
};

// Throws ShapeError if the parameter layout does not match `model`.
void check_layout(const ScoreModel& model, const ModelParams& params);
// Throws ShapeError if `edge` does not address `params`.
void check_edge(const ModelParams& params, const Triple& edge);

// Row-level score and gradient. No shape checks; callers guarantee
// head/tail have d_E entries and rel has d_R entries.
double score_rows(ScoreKind kind, std::span<const double> head,
                  std::span<const double> tail, std::span<const double> rel);
// Writes d phi into the three output spans (same sizes as the inputs).
void score_rows_gradient(ScoreKind kind, std::span<const double> head,
                         std::span<const double> tail,
                         std::span<const double> rel, std::span<double> d_head,
                         std::span<double> d_tail, std::span<double> d_rel);

double score(const ScoreModel& model, const ModelParams& params,
             const Triple& edge);
ScoreGradient score_gradient(const ScoreModel& model, const ModelParams& params,
                             const Triple& edge);
double edge_probability(const ScoreModel& model, const ModelParams& params,
                        const Triple& edge);

// sigma(x), kept strictly inside (0, 1) for every finite x: results are
// clamped to [DBL_MIN, 1 - 2^-53].
double logistic(double x);
// log(1 + e^x) without overflow.
double softplus(double x);

// Upper bound C >= 2 on |phi| over rows in balls of radius U.
double score_sup_bound(const ScoreModel& model, double radius);
// Lipschitz constant alpha of phi on the same domain, from a bound on the
// gradient norm (the domain is convex).
double lipschitz_bound(const ScoreModel& model, double radius);

}  // namespace mrnet

#endif  // MRNET_MODEL_H_
