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

#include "mrnet/model.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mrnet/errors.h"

namespace mrnet {

Triple NetworkShape::triple_at(std::uint64_t index) const {
  Triple t;
  t.rel = static_cast<std::uint32_t>(index % n_relations);
  index /= n_relations;
  t.tail = static_cast<std::uint32_t>(index % n_entities);
  t.head = static_cast<std::uint32_t>(index / n_entities);
  return t;
}

void NetworkShape::validate() const {
  if (n_entities < 1 || n_relations < 1) {
    throw DomainError("network needs at least one entity and one relation");
  }
  if (!(obs_rate >= 0.0 && obs_rate <= 1.0)) {
    throw DomainError("observation rate must lie in [0, 1]");
  }
}

std::string_view to_string(ScoreKind kind) {
  switch (kind) {
    case ScoreKind::kDistance:
      return "distance";
    case ScoreKind::kBilinear:
      return "bilinear";
    case ScoreKind::kCombinedQuadratic:
      return "combined";
  }
  return "unknown";
}

ScoreKind parse_score_kind(std::string_view name) {
  if (name == "distance") return ScoreKind::kDistance;
  if (name == "bilinear") return ScoreKind::kBilinear;
  if (name == "combined" || name == "combined_quadratic") {
    return ScoreKind::kCombinedQuadratic;
  }
  throw DomainError("unknown score model '" + std::string(name) + "'");
}

ModelParams::ModelParams(std::size_t n_entities, std::size_t entity_dim,
                         std::size_t n_relations, std::size_t relation_dim,
                         double radius)
    : n_entities_(n_entities),
      entity_dim_(entity_dim),
      n_relations_(n_relations),
      relation_dim_(relation_dim),
      radius_(radius),
      values_(n_entities * entity_dim + n_relations * relation_dim, 0.0) {}

ModelParams ModelParams::zeros(const ScoreModel& model, std::size_t n_entities,
                               std::size_t n_relations, double radius) {
  return ModelParams(n_entities, model.entity_dim(), n_relations,
                     model.relation_dim(), radius);
}

namespace {

double norm(std::span<const double> row) {
  double s = 0.0;
  for (double v : row) s += v * v;
  return std::sqrt(s);
}

}  // namespace

void ModelParams::validate() const {
  if (!(radius_ > 0.0) || !std::isfinite(radius_)) {
    throw DomainError("radius must be positive and finite");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw DomainError("non-finite parameter at flat index " +
                        std::to_string(i));
    }
  }
  const double limit = radius_ * (1.0 + 1e-12);
  for (std::size_t i = 0; i < n_entities_; ++i) {
    if (norm(entity(i)) > limit) {
      throw DomainError("entity row " + std::to_string(i) +
                        " lies outside the parameter ball");
    }
  }
  for (std::size_t k = 0; k < n_relations_; ++k) {
    if (norm(relation(k)) > limit) {
      throw DomainError("relation row " + std::to_string(k) +
                        " lies outside the parameter ball");
    }
  }
}

void check_layout(const ScoreModel& model, const ModelParams& params) {
  if (params.entity_dim() != model.entity_dim() ||
      params.relation_dim() != model.relation_dim()) {
    throw ShapeError("parameters have row sizes (" +
                     std::to_string(params.entity_dim()) + ", " +
                     std::to_string(params.relation_dim()) + ") but the " +
                     std::string(to_string(model.kind)) + " model with d=" +
                     std::to_string(model.latent_dim) + " needs (" +
                     std::to_string(model.entity_dim()) + ", " +
                     std::to_string(model.relation_dim()) + ")");
  }
}

void check_edge(const ModelParams& params, const Triple& edge) {
  if (edge.head >= params.n_entities() || edge.tail >= params.n_entities() ||
      edge.rel >= params.n_relations()) {
    throw ShapeError("edge (" + std::to_string(edge.head) + ", " +
                     std::to_string(edge.tail) + ", " +
                     std::to_string(edge.rel) + ") outside N=" +
                     std::to_string(params.n_entities()) +
                     ", K=" + std::to_string(params.n_relations()));
  }
}

double score_rows(ScoreKind kind, std::span<const double> head,
                  std::span<const double> tail, std::span<const double> rel) {
  const std::size_t d = head.size();
  double s = 0.0;
  switch (kind) {
    case ScoreKind::kDistance: {
      for (std::size_t l = 0; l < d; ++l) {
        const double delta = head[l] + rel[l] - tail[l];
        s += delta * delta;
      }
      return rel[d] - s;
    }
    case ScoreKind::kBilinear: {
      for (std::size_t l = 0; l < d; ++l) s += head[l] * rel[l] * tail[l];
      return s;
    }
    case ScoreKind::kCombinedQuadratic: {
      for (std::size_t l = 0; l < d; ++l) {
        const double delta = head[l] + rel[l] - tail[l];
        s += rel[d + l] * delta * delta;
      }
      return s;
    }
  }
  return s;
}

void score_rows_gradient(ScoreKind kind, std::span<const double> head,
                         std::span<const double> tail,
                         std::span<const double> rel, std::span<double> d_head,
                         std::span<double> d_tail, std::span<double> d_rel) {
  const std::size_t d = head.size();
  switch (kind) {
    case ScoreKind::kDistance: {
      for (std::size_t l = 0; l < d; ++l) {
        const double delta = head[l] + rel[l] - tail[l];
        d_head[l] = -2.0 * delta;
        d_tail[l] = 2.0 * delta;
        d_rel[l] = -2.0 * delta;
      }
      d_rel[d] = 1.0;
      return;
    }
    case ScoreKind::kBilinear: {
      for (std::size_t l = 0; l < d; ++l) {
        d_head[l] = rel[l] * tail[l];
        d_tail[l] = rel[l] * head[l];
        d_rel[l] = head[l] * tail[l];
      }
      return;
    }
    case ScoreKind::kCombinedQuadratic: {
      for (std::size_t l = 0; l < d; ++l) {
        const double delta = head[l] + rel[l] - tail[l];
        const double g = 2.0 * rel[d + l] * delta;
        d_head[l] = g;
        d_tail[l] = -g;
        d_rel[l] = g;
        d_rel[d + l] = delta * delta;
      }
      return;
    }
  }
}

double score(const ScoreModel& model, const ModelParams& params,
             const Triple& edge) {
  check_layout(model, params);
  check_edge(params, edge);
  return score_rows(model.kind, params.entity(edge.head),
                    params.entity(edge.tail), params.relation(edge.rel));
}

ScoreGradient score_gradient(const ScoreModel& model, const ModelParams& params,
                             const Triple& edge) {
  check_layout(model, params);
  check_edge(params, edge);
  ScoreGradient g;
  g.head.resize(params.entity_dim());
  g.tail.resize(params.entity_dim());
  g.rel.resize(params.relation_dim());
  score_rows_gradient(model.kind, params.entity(edge.head),
                      params.entity(edge.tail), params.relation(edge.rel),
                      g.head, g.tail, g.rel);
  return g;
}

double logistic(double x) {
  constexpr double kLow = std::numeric_limits<double>::min();
  constexpr double kHigh = 1.0 - 0x1.0p-53;
  double p;
  if (x >= 0.0) {
    p = 1.0 / (1.0 + std::exp(-x));
  } else {
    const double e = std::exp(x);
    p = e / (1.0 + e);
  }
  return std::clamp(p, kLow, kHigh);
}

double softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double edge_probability(const ScoreModel& model, const ModelParams& params,
                        const Triple& edge) {
  return logistic(score(model, params, edge));
}

namespace {

void require_radius(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw DomainError("radius U must be positive and finite");
  }
}

}  // namespace

double score_sup_bound(const ScoreModel& model, double radius) {
  require_radius(radius);
  const double u = radius;
  double c = 0.0;
  switch (model.kind) {
    case ScoreKind::kDistance:
      // |b_k| <= U and |theta_i + a_k - theta_j| <= 3U.
      c = u + 9.0 * u * u;
      break;
    case ScoreKind::kBilinear:
      c = u * u * u;
      break;
    case ScoreKind::kCombinedQuadratic:
      c = 9.0 * u * u * u;
      break;
  }
  return std::max(2.0, c);
}

double lipschitz_bound(const ScoreModel& model, double radius) {
  require_radius(radius);
  const double u = radius;
  switch (model.kind) {
    case ScoreKind::kDistance:
      // |grad|^2 = 3 * 4|delta|^2 + 1 with |delta| <= 3U.
      return std::sqrt(1.0 + 108.0 * u * u);
    case ScoreKind::kBilinear:
      // Each block is bounded by |w|_inf |theta| <= U^2.
      return std::sqrt(3.0) * u * u;
    case ScoreKind::kCombinedQuadratic:
      // Three blocks of 2|b|_inf|delta| <= 6U^2, plus |delta o delta| <= 9U^2.
      return std::sqrt(189.0) * u * u;
  }
  return 0.0;
}

}  // namespace mrnet
