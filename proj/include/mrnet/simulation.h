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

#ifndef MRNET_SIMULATION_H_
#define MRNET_SIMULATION_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mrnet/estimation.h"
#include "mrnet/evaluation.h"
#include "mrnet/model.h"
#include "mrnet/rng.h"

namespace mrnet {

// Ground-truth generator: coordinates drawn from truncated normals.
struct GenSpec {
  ScoreModel model;
  NetworkShape shape;
  double entity_sd = 1.0;  // theta*
  double shift_sd = 1.0;   // a_k* (Distance, CombinedQuadratic)
  double weight_sd = 0.5;  // b_k* (or w_k* for Bilinear)
  double truncation = 20.0;
  std::uint64_t seed = 1;

  void validate() const;
  // truncation * sqrt(max(d_E, d_R)): every generated row lies in this ball.
  double implied_radius() const;
};

ModelParams generate_truth(const GenSpec& spec);

// Normal(0, sd^2) conditioned on [-half_width, half_width], by rejection.
double truncated_normal(Engine& engine, double sd, double half_width);

// Lazily realized labels Y_lambda ~ Ber(M_lambda(x*)). Each label is a pure
// function of (seed, lambda): Y = 1 iff logit(u) < phi* with u uniform on
// (0, 1) from a counter-based stream.
class NetworkSample {
 public:
  NetworkSample(ScoreModel model, ModelParams truth, std::uint64_t seed);

  std::uint8_t label(const Triple& edge) const;
  double probability(const Triple& edge) const;
  const ModelParams& truth() const { return truth_; }
  const ScoreModel& model() const { return model_; }
  std::uint64_t seed() const { return seed_; }

 private:
  ScoreModel model_;
  ModelParams truth_;
  NetworkShape shape_;
  std::uint64_t seed_;
  CounterRng rng_;
};

NetworkSample sample_network(const ScoreModel& model, const ModelParams& truth,
                             std::uint64_t seed);

// Each edge of Lambda is observed independently with probability gamma.
// Implemented as |S| ~ Binomial(N^2 K, gamma) followed by |S| distinct edges
// chosen uniformly, which has the same law. Items are sorted by flat index.
ObservationSet sample_observations(const NetworkShape& shape,
                                   const NetworkSample& labels,
                                   std::uint64_t seed);
// Reference implementation: one coin flip per edge, O(N^2 K).
ObservationSet sample_observations_per_edge(const NetworkShape& shape,
                                            const NetworkSample& labels,
                                            std::uint64_t seed);

// `count` distinct flat indices in [0, population), uniformly, ascending.
std::vector<std::uint64_t> sample_distinct(std::uint64_t population,
                                           std::uint64_t count, Engine& engine);

struct ExperimentGrid {
  GenSpec gen;  // shape.n_entities / obs_rate are overridden per cell
  std::vector<std::size_t> entity_counts;
  std::vector<double> obs_rates;
  std::size_t replicates = 1;
  TrainConfig train;
  // Fit inside the generator's ball (x* must be feasible).
  bool radius_from_generator = true;
  // When set, x* is projected onto this ball and the fit uses the same
  // radius (overrides radius_from_generator).
  std::optional<double> truth_radius;
  // Evaluate on all of Lambda up to this many edges, else on this many
  // uniformly drawn edges.
  std::uint64_t eval_cap = 1'000'000;
  std::size_t threads = 1;
  bool timing = true;

  void validate() const;
};

struct GridRow {
  std::size_t n_entities = 0;
  double obs_rate = 0.0;
  std::size_t replicate = 0;
  double avg_kl = 0.0;
  double mse_phi = 0.0;
  double link_err = 0.0;
  double seconds = 0.0;
  std::size_t n_observed = 0;
  std::size_t n_evaluated = 0;
  bool subsampled = false;
  bool failed = false;
  std::string error;
};

// Seeds used by one replicate, derived from (grid seed, cell, replicate).
struct ReplicateSeeds {
  std::uint64_t truth;
  std::uint64_t labels;
  std::uint64_t mask;
  std::uint64_t train;
  std::uint64_t eval;
};
ReplicateSeeds replicate_seeds(std::uint64_t grid_seed, std::size_t cell,
                               std::size_t replicate);

// One cell/replicate: generate, sample, train, evaluate.
GridRow run_replicate(const ExperimentGrid& grid, std::size_t n_entities,
                      double obs_rate, std::size_t cell, std::size_t replicate);

// Rows ordered by (entity count, obs rate, replicate). A replicate that
// throws is marked failed with NaN metrics; other cells continue.
std::vector<GridRow> run_grid(const ExperimentGrid& grid);

}  // namespace mrnet

#endif  // MRNET_SIMULATION_H_
