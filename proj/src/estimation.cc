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

#include "mrnet/estimation.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "mrnet/errors.h"
#include "mrnet/rng.h"

namespace mrnet {

ObservationSet::ObservationSet(NetworkShape shape,
                               std::vector<Observation> items)
    : shape_(shape), items_(std::move(items)) {
  shape_.validate();
  std::vector<std::uint64_t> keys;
  keys.reserve(items_.size());
  for (const Observation& o : items_) {
    if (o.label > 1) throw DomainError("labels must be 0 or 1");
    if (!shape_.contains(o.edge)) {
      throw ShapeError("observed edge (" + std::to_string(o.edge.head) + ", " +
                        std::to_string(o.edge.tail) + ", " +
                        std::to_string(o.edge.rel) +
                        ") outside the network shape");
    }
    keys.push_back(shape_.edge_index(o.edge));
  }
  std::sort(keys.begin(), keys.end());
  if (std::adjacent_find(keys.begin(), keys.end()) != keys.end()) {
    throw DomainError("observation set contains a duplicate edge");
  }
}

void validate(const TrainConfig& config, std::size_t dimension) {
  if (!(config.learning_rate > 0.0)) {
    throw DomainError("learning_rate must be positive");
  }
  if (!(config.adagrad_eps > 0.0)) {
    throw DomainError("adagrad_eps must be positive");
  }
  if (config.batch_size == 0) throw DomainError("batch_size must be >= 1");
  if (!(config.rho1 >= 0.0) || !(config.rho2 >= 0.0)) {
    throw DomainError("penalty weights rho1, rho2 must be >= 0");
  }
  if (config.sparsity_cap && *config.sparsity_cap > dimension) {
    throw DomainError("sparsity_cap " + std::to_string(*config.sparsity_cap) +
                      " exceeds the parameter dimension " +
                      std::to_string(dimension));
  }
  if (!(config.radius > 0.0) || !std::isfinite(config.radius)) {
    throw DomainError("radius must be positive and finite");
  }
  if (!(config.init_scale > 0.0)) {
    throw DomainError("init_scale must be positive");
  }
}

double log_likelihood(const ScoreModel& model, const ModelParams& params,
                      std::span<const Observation> obs) {
  check_layout(model, params);
  double total = 0.0;
  for (const Observation& o : obs) {
    check_edge(params, o.edge);
    const double phi = score_rows(model.kind, params.entity(o.edge.head),
                                  params.entity(o.edge.tail),
                                  params.relation(o.edge.rel));
    total -= o.label ? softplus(-phi) : softplus(phi);
  }
  return total;
}

double log_likelihood(const ScoreModel& model, const ModelParams& params,
                      const ObservationSet& obs) {
  return log_likelihood(model, params, obs.items());
}

namespace {

double penalty(const ModelParams& params, double rho1, double rho2) {
  if (rho1 == 0.0 && rho2 == 0.0) return 0.0;
  double l1 = 0.0;
  double l2 = 0.0;
  for (double v : params.flat()) {
    l1 += std::abs(v);
    l2 += v * v;
  }
  return rho1 * l1 + rho2 * l2;
}

double sign(double v) { return (v > 0.0) - (v < 0.0); }

void sorted_unique(std::vector<std::uint32_t>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

std::size_t position(const std::vector<std::uint32_t>& rows,
                     std::uint32_t row) {
  return static_cast<std::size_t>(
      std::lower_bound(rows.begin(), rows.end(), row) - rows.begin());
}

}  // namespace

double penalized_objective(const ScoreModel& model, const ModelParams& params,
                           const ObservationSet& obs, double rho1,
                           double rho2) {
  if (!(rho1 >= 0.0) || !(rho2 >= 0.0)) {
    throw DomainError("penalty weights rho1, rho2 must be >= 0");
  }
  return log_likelihood(model, params, obs) - penalty(params, rho1, rho2);
}

SparseGradient objective_gradient(const ScoreModel& model,
                                  const ModelParams& params,
                                  std::span<const Observation> batch,
                                  double rho1, double rho2,
                                  double batch_scale) {
  check_layout(model, params);
  if (batch.empty()) throw DomainError("gradient batch is empty");
  if (!(batch_scale > 0.0)) throw DomainError("batch_scale must be positive");

  SparseGradient g;
  g.entity_rows.reserve(2 * batch.size());
  g.relation_rows.reserve(batch.size());
  for (const Observation& o : batch) {
    check_edge(params, o.edge);
    g.entity_rows.push_back(o.edge.head);
    g.entity_rows.push_back(o.edge.tail);
    g.relation_rows.push_back(o.edge.rel);
  }
  sorted_unique(g.entity_rows);
  sorted_unique(g.relation_rows);

  const std::size_t de = params.entity_dim();
  const std::size_t dr = params.relation_dim();
  g.entity_grad.assign(g.entity_rows.size() * de, 0.0);
  g.relation_grad.assign(g.relation_rows.size() * dr, 0.0);

  std::vector<double> d_head(de), d_tail(de), d_rel(dr);
  for (const Observation& o : batch) {
    const auto head = params.entity(o.edge.head);
    const auto tail = params.entity(o.edge.tail);
    const auto rel = params.relation(o.edge.rel);
    const double phi = score_rows(model.kind, head, tail, rel);
    const double residual = batch_scale * (o.label - logistic(phi));
    if (residual == 0.0) continue;
    score_rows_gradient(model.kind, head, tail, rel, d_head, d_tail, d_rel);
    double* gh = &g.entity_grad[position(g.entity_rows, o.edge.head) * de];
    double* gt = &g.entity_grad[position(g.entity_rows, o.edge.tail) * de];
    double* gr = &g.relation_grad[position(g.relation_rows, o.edge.rel) * dr];
    for (std::size_t l = 0; l < de; ++l) {
      gh[l] += residual * d_head[l];
      gt[l] += residual * d_tail[l];
    }
    for (std::size_t l = 0; l < dr; ++l) gr[l] += residual * d_rel[l];
  }

  if (rho1 != 0.0 || rho2 != 0.0) {
    for (std::size_t r = 0; r < g.entity_rows.size(); ++r) {
      const auto row = params.entity(g.entity_rows[r]);
      for (std::size_t l = 0; l < de; ++l) {
        g.entity_grad[r * de + l] -= rho1 * sign(row[l]) + 2.0 * rho2 * row[l];
      }
    }
    for (std::size_t r = 0; r < g.relation_rows.size(); ++r) {
      const auto row = params.relation(g.relation_rows[r]);
      for (std::size_t l = 0; l < dr; ++l) {
        g.relation_grad[r * dr + l] -=
            rho1 * sign(row[l]) + 2.0 * rho2 * row[l];
      }
    }
  }
  return g;
}

namespace {

void project_row(std::span<double> row, double radius) {
  double s = 0.0;
  for (double v : row) s += v * v;
  const double n = std::sqrt(s);
  if (n > radius) {
    const double f = radius / n;
    for (double& v : row) v *= f;
  }
}

}  // namespace

void project_ball_inplace(ModelParams& params, double radius) {
  if (!(radius > 0.0)) throw DomainError("radius must be positive");
  for (std::size_t i = 0; i < params.n_entities(); ++i) {
    project_row(params.entity(i), radius);
  }
  for (std::size_t k = 0; k < params.n_relations(); ++k) {
    project_row(params.relation(k), radius);
  }
  params.set_radius(radius);
}

ModelParams project_ball(ModelParams params, double radius) {
  project_ball_inplace(params, radius);
  return params;
}

void project_rows(ModelParams& params,
                  std::span<const std::uint32_t> entity_rows,
                  std::span<const std::uint32_t> relation_rows,
                  double radius) {
  for (std::uint32_t i : entity_rows) project_row(params.entity(i), radius);
  for (std::uint32_t k : relation_rows) project_row(params.relation(k), radius);
}

void project_l0_inplace(ModelParams& params, std::size_t cap) {
  auto x = params.flat();
  if (cap >= x.size()) return;
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto before = [&](std::size_t a, std::size_t b) {
    const double fa = std::abs(x[a]);
    const double fb = std::abs(x[b]);
    return fa > fb || (fa == fb && a < b);
  };
  std::nth_element(order.begin(), order.begin() + static_cast<long>(cap),
                   order.end(), before);
  for (auto it = order.begin() + static_cast<long>(cap); it != order.end();
       ++it) {
    x[*it] = 0.0;
  }
}

ModelParams project_l0(ModelParams params, std::size_t cap) {
  project_l0_inplace(params, cap);
  return params;
}

std::size_t count_nonzeros(const ModelParams& params) {
  const auto x = params.flat();
  return static_cast<std::size_t>(
      std::count_if(x.begin(), x.end(), [](double v) { return v != 0.0; }));
}

ModelParams initial_params(const ScoreModel& model, const NetworkShape& shape,
                           const TrainConfig& config) {
  ModelParams params = ModelParams::zeros(model, shape.n_entities,
                                          shape.n_relations, config.radius);
  Engine engine(derive_seed(config.seed, {0x1417}));
  std::uniform_real_distribution<double> u(-config.init_scale,
                                           config.init_scale);
  for (double& v : params.flat()) v = u(engine);
  project_ball_inplace(params, config.radius);
  return params;
}

TrainResult train_from(const ScoreModel& model, const ObservationSet& obs,
                       const TrainConfig& config, ModelParams init) {
  if (obs.empty()) throw DomainError("cannot train on an empty observation set");
  check_layout(model, init);
  if (init.n_entities() != obs.shape().n_entities ||
      init.n_relations() != obs.shape().n_relations) {
    throw ShapeError("initial parameters do not match the observation shape");
  }
  validate(config, init.dimension());

  TrainResult result;
  result.params = std::move(init);
  ModelParams& x = result.params;
  project_ball_inplace(x, config.radius);
  result.initial_objective =
      penalized_objective(model, x, obs, config.rho1, config.rho2);

  const std::size_t de = x.entity_dim();
  const std::size_t dr = x.relation_dim();
  std::vector<double> accum(x.dimension(), 0.0);
  const auto items = obs.items();
  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<Observation> batch;
  batch.reserve(config.batch_size);
  Engine engine(derive_seed(config.seed, {0x5107}));

  auto step = [&](std::size_t offset, const double* grad, std::size_t len) {
    auto flat = x.flat();
    for (std::size_t l = 0; l < len; ++l) {
      const double g = grad[l];
      double& acc = accum[offset + l];
      acc += g * g;
      flat[offset + l] += config.learning_rate * g / (std::sqrt(acc) + config.adagrad_eps);
    }
  };

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), engine);
    for (std::size_t start = 0; start < order.size();
         start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      batch.clear();
      for (std::size_t b = start; b < stop; ++b) batch.push_back(items[order[b]]);
      const double scale =
          static_cast<double>(items.size()) / static_cast<double>(batch.size());
      const SparseGradient g = objective_gradient(model, x, batch, config.rho1,
                                                  config.rho2, scale);
      for (std::size_t r = 0; r < g.entity_rows.size(); ++r) {
        step(x.entity_offset(g.entity_rows[r]), &g.entity_grad[r * de], de);
      }
      for (std::size_t r = 0; r < g.relation_rows.size(); ++r) {
        step(x.relation_offset(g.relation_rows[r]), &g.relation_grad[r * dr], dr);
      }
      project_rows(x, g.entity_rows, g.relation_rows, config.radius);
    }
    if (config.sparsity_cap) project_l0_inplace(x, *config.sparsity_cap);
    result.objective_trace.push_back(
        penalized_objective(model, x, obs, config.rho1, config.rho2));
    result.nonzero_trace.push_back(count_nonzeros(x));
  }
  return result;
}

TrainResult train(const ScoreModel& model, const ObservationSet& obs,
                  const TrainConfig& config) {
  if (obs.empty()) throw DomainError("cannot train on an empty observation set");
  return train_from(model, obs, config,
                    initial_params(model, obs.shape(), config));
}

}  // namespace mrnet
