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

#include "mrnet/simulation.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>
#include <unordered_set>

#include "mrnet/errors.h"

namespace mrnet {

void GenSpec::validate() const {
  shape.validate();
  if (!(entity_sd > 0.0) || !(shift_sd > 0.0) || !(weight_sd > 0.0)) {
    throw DomainError("generator standard deviations must be positive");
  }
  if (!(truncation > 0.0)) throw DomainError("truncation must be positive");
  if (model.latent_dim == 0) throw DomainError("latent dimension must be >= 1");
}

double GenSpec::implied_radius() const {
  const double dim = static_cast<double>(
      std::max(model.entity_dim(), model.relation_dim()));
  return truncation * std::sqrt(dim);
}

double truncated_normal(Engine& engine, double sd, double half_width) {
  std::normal_distribution<double> normal(0.0, sd);
  for (;;) {
    const double v = normal(engine);
    if (std::abs(v) <= half_width) return v;
  }
}

ModelParams generate_truth(const GenSpec& spec) {
  spec.validate();
  const std::size_t d = spec.model.latent_dim;
  ModelParams x = ModelParams::zeros(spec.model, spec.shape.n_entities,
                                     spec.shape.n_relations,
                                     spec.implied_radius());
  Engine engine(derive_seed(spec.seed, {0x7e57}));
  auto draw = [&](double sd) {
    return truncated_normal(engine, sd, spec.truncation);
  };
  for (std::size_t i = 0; i < x.n_entities(); ++i) {
    for (double& v : x.entity(i)) v = draw(spec.entity_sd);
  }
  for (std::size_t k = 0; k < x.n_relations(); ++k) {
    auto w = x.relation(k);
    switch (spec.model.kind) {
      case ScoreKind::kDistance:
        for (std::size_t l = 0; l < d; ++l) w[l] = draw(spec.shift_sd);
        w[d] = draw(spec.weight_sd);
        break;
      case ScoreKind::kBilinear:
        for (std::size_t l = 0; l < d; ++l) w[l] = draw(spec.weight_sd);
        break;
      case ScoreKind::kCombinedQuadratic:
        for (std::size_t l = 0; l < d; ++l) w[l] = draw(spec.shift_sd);
        for (std::size_t l = 0; l < d; ++l) w[d + l] = draw(spec.weight_sd);
        break;
    }
  }
  return x;
}

NetworkSample::NetworkSample(ScoreModel model, ModelParams truth,
                             std::uint64_t seed)
    : model_(model),
      truth_(std::move(truth)),
      shape_{truth_.n_entities(), truth_.n_relations(), 1.0},
      seed_(seed),
      rng_(derive_seed(seed, {0x1abe1})) {
  check_layout(model_, truth_);
}

std::uint8_t NetworkSample::label(const Triple& edge) const {
  check_edge(truth_, edge);
  const double phi = score_rows(model_.kind, truth_.entity(edge.head),
                                truth_.entity(edge.tail),
                                truth_.relation(edge.rel));
  const double u = rng_.uniform(shape_.edge_index(edge));
  // u < sigma(phi)  <=>  logit(u) < phi; u is never 0 or 1.
  return std::log(u) - std::log1p(-u) < phi ? 1 : 0;
}

double NetworkSample::probability(const Triple& edge) const {
  return edge_probability(model_, truth_, edge);
}

NetworkSample sample_network(const ScoreModel& model, const ModelParams& truth,
                             std::uint64_t seed) {
  return NetworkSample(model, truth, seed);
}

std::vector<std::uint64_t> sample_distinct(std::uint64_t population,
                                           std::uint64_t count,
                                           Engine& engine) {
  if (count > population) {
    throw DomainError("cannot draw more distinct items than the population");
  }
  std::vector<std::uint64_t> out;
  out.reserve(count);
  if (count == population) {
    for (std::uint64_t i = 0; i < population; ++i) out.push_back(i);
    return out;
  }
  if (population <= (std::uint64_t{1} << 22) || count * 4 >= population) {
    // Selection sampling: one pass, ascending output.
    std::uint64_t needed = count;
    for (std::uint64_t i = 0; i < population && needed > 0; ++i) {
      const double u = open_unit(engine());
      if (u * static_cast<double>(population - i) < static_cast<double>(needed)) {
        out.push_back(i);
        --needed;
      }
    }
    return out;
  }
  std::uniform_int_distribution<std::uint64_t> pick(0, population - 1);
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(count * 2);
  while (out.size() < count) {
    const std::uint64_t v = pick(engine);
    if (seen.insert(v).second) out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

void check_sample_shape(const NetworkShape& shape, const NetworkSample& labels) {
  shape.validate();
  if (labels.truth().n_entities() != shape.n_entities ||
      labels.truth().n_relations() != shape.n_relations) {
    throw ShapeError("label sample and network shape disagree");
  }
}

}  // namespace

ObservationSet sample_observations(const NetworkShape& shape,
                                   const NetworkSample& labels,
                                   std::uint64_t seed) {
  check_sample_shape(shape, labels);
  const std::uint64_t edges = shape.n_edges();
  Engine engine(derive_seed(seed, {0x3a5c}));
  std::uint64_t count = 0;
  if (shape.obs_rate >= 1.0) {
    count = edges;
  } else if (shape.obs_rate > 0.0) {
    std::binomial_distribution<std::uint64_t> binom(edges, shape.obs_rate);
    count = binom(engine);
  }
  std::vector<Observation> items;
  items.reserve(count);
  for (std::uint64_t idx : sample_distinct(edges, count, engine)) {
    const Triple t = shape.triple_at(idx);
    items.push_back({t, labels.label(t)});
  }
  return ObservationSet(shape, std::move(items));
}

ObservationSet sample_observations_per_edge(const NetworkShape& shape,
                                            const NetworkSample& labels,
                                            std::uint64_t seed) {
  check_sample_shape(shape, labels);
  const CounterRng coin(derive_seed(seed, {0xc011}));
  std::vector<Observation> items;
  for (std::uint64_t idx = 0; idx < shape.n_edges(); ++idx) {
    if (coin.uniform(idx) < shape.obs_rate) {
      const Triple t = shape.triple_at(idx);
      items.push_back({t, labels.label(t)});
    }
  }
  return ObservationSet(shape, std::move(items));
}

void ExperimentGrid::validate() const {
  if (entity_counts.empty() || obs_rates.empty()) {
    throw DomainError("experiment grid needs entity counts and obs rates");
  }
  if (replicates < 1) throw DomainError("replicates must be >= 1");
  for (std::size_t n : entity_counts) {
    if (n < 1) throw DomainError("entity counts must be >= 1");
  }
  for (double g : obs_rates) {
    if (!(g >= 0.0 && g <= 1.0)) throw DomainError("obs rates must be in [0,1]");
  }
  if (eval_cap < 1) throw DomainError("eval_cap must be >= 1");
}

ReplicateSeeds replicate_seeds(std::uint64_t grid_seed, std::size_t cell,
                               std::size_t replicate) {
  const std::uint64_t base = derive_seed(grid_seed, {cell, replicate});
  return {derive_seed(base, {1}), derive_seed(base, {2}),
          derive_seed(base, {3}), derive_seed(base, {4}),
          derive_seed(base, {5})};
}

GridRow run_replicate(const ExperimentGrid& grid, std::size_t n_entities,
                      double obs_rate, std::size_t cell,
                      std::size_t replicate) {
  const auto start = std::chrono::steady_clock::now();
  GridRow row;
  row.n_entities = n_entities;
  row.obs_rate = obs_rate;
  row.replicate = replicate;

  const ReplicateSeeds seeds = replicate_seeds(grid.gen.seed, cell, replicate);
  GenSpec gen = grid.gen;
  gen.shape.n_entities = n_entities;
  gen.shape.obs_rate = obs_rate;
  gen.seed = seeds.truth;
  ModelParams truth = generate_truth(gen);
  if (grid.truth_radius) project_ball_inplace(truth, *grid.truth_radius);
  const NetworkSample labels = sample_network(gen.model, truth, seeds.labels);
  const ObservationSet obs = sample_observations(gen.shape, labels, seeds.mask);
  row.n_observed = obs.size();

  TrainConfig config = grid.train;
  config.seed = seeds.train;
  if (grid.truth_radius) {
    config.radius = *grid.truth_radius;
  } else if (grid.radius_from_generator) {
    config.radius = truth.radius();
  }
  const TrainResult fit = train(gen.model, obs, config);

  EvalReport report;
  const std::uint64_t edges = gen.shape.n_edges();
  if (edges <= grid.eval_cap) {
    report = evaluate_losses(gen.model, fit.params, truth);
  } else {
    Engine engine(seeds.eval);
    std::uniform_int_distribution<std::uint64_t> pick(0, edges - 1);
    std::vector<Triple> sample;
    sample.reserve(grid.eval_cap);
    for (std::uint64_t e = 0; e < grid.eval_cap; ++e) {
      sample.push_back(gen.shape.triple_at(pick(engine)));
    }
    report = evaluate_losses(gen.model, fit.params, truth, sample);
    row.subsampled = true;
  }
  row.avg_kl = report.avg_kl;
  row.mse_phi = report.mse_phi;
  row.link_err = report.link_err;
  row.n_evaluated = report.n_evaluated;
  if (grid.timing) {
    row.seconds = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - start)
                      .count();
  }
  return row;
}

std::vector<GridRow> run_grid(const ExperimentGrid& grid) {
  grid.validate();
  struct Job {
    std::size_t n_entities;
    double obs_rate;
    std::size_t cell;
    std::size_t replicate;
  };
  std::vector<Job> jobs;
  std::size_t cell = 0;
  for (std::size_t n : grid.entity_counts) {
    for (double g : grid.obs_rates) {
      for (std::size_t r = 0; r < grid.replicates; ++r) {
        jobs.push_back({n, g, cell, r});
      }
      ++cell;
    }
  }

  std::vector<GridRow> rows(jobs.size());
  auto run = [&](std::size_t j) {
    const Job& job = jobs[j];
    try {
      rows[j] = run_replicate(grid, job.n_entities, job.obs_rate, job.cell,
                              job.replicate);
    } catch (const std::exception& e) {
      GridRow& row = rows[j];
      row.n_entities = job.n_entities;
      row.obs_rate = job.obs_rate;
      row.replicate = job.replicate;
      row.avg_kl = row.mse_phi = row.link_err =
          std::numeric_limits<double>::quiet_NaN();
      row.failed = true;
      row.error = e.what();
    }
  };

  const std::size_t threads = std::max<std::size_t>(1, grid.threads);
  if (threads == 1 || jobs.size() < 2) {
    for (std::size_t j = 0; j < jobs.size(); ++j) run(j);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < std::min(threads, jobs.size()); ++w) {
    workers.emplace_back([&] {
      for (std::size_t j = next++; j < jobs.size(); j = next++) run(j);
    });
  }
  for (std::thread& t : workers) t.join();
  return rows;
}

}  // namespace mrnet
