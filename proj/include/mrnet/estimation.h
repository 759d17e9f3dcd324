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

#ifndef MRNET_ESTIMATION_H_
#define MRNET_ESTIMATION_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mrnet/model.h"

namespace mrnet {

struct Observation {
  Triple edge;
  std::uint8_t label = 0;  // Y in {0, 1}.
};

// Observed edges with labels. No duplicate triples; all edges in `shape`.
class ObservationSet {
 public:
  ObservationSet() = default;
  // Validates labels, edge ranges and uniqueness; throws DomainError.
  ObservationSet(NetworkShape shape, std::vector<Observation> items);

  const NetworkShape& shape() const { return shape_; }
  std::span<const Observation> items() const { return items_; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }

 private:
  NetworkShape shape_;
  std::vector<Observation> items_;
};

struct TrainConfig {
  double learning_rate = 0.1;
  double adagrad_eps = 1e-8;
  std::size_t epochs = 100;
  std::size_t batch_size = 128;
  double rho1 = 0.0;
  double rho2 = 0.0;
  std::optional<std::size_t> sparsity_cap;  // m_tau
  double radius = 20.0;                     // U
  std::uint64_t seed = 1;
  double init_scale = 0.1;
};

// Throws DomainError when a field is out of range for a model of dimension m.
void validate(const TrainConfig& config, std::size_t dimension);

// l(x; Y_S): sum over S of Y log M + (1 - Y) log(1 - M).
double log_likelihood(const ScoreModel& model, const ModelParams& params,
                      const ObservationSet& obs);
double log_likelihood(const ScoreModel& model, const ModelParams& params,
                      std::span<const Observation> obs);

// l(x) - rho1 |x|_1 - rho2 |x|^2.
double penalized_objective(const ScoreModel& model, const ModelParams& params,
                           const ObservationSet& obs, double rho1, double rho2);

// Ascent direction restricted to the entity and relation rows a batch
// touches. Rows are sorted ascending; gradient blocks are stored row-major.
struct SparseGradient {
  std::vector<std::uint32_t> entity_rows;
  std::vector<double> entity_grad;  // entity_rows.size() * d_E
  std::vector<std::uint32_t> relation_rows;
  std::vector<double> relation_grad;  // relation_rows.size() * d_R
};

// batch_scale multiplies the data term (|S| / |batch| gives an unbiased
// estimate of the full-data gradient). The penalty is applied at full
// strength to every touched row, with sign(0) = 0 for the L1 part.
SparseGradient objective_gradient(const ScoreModel& model,
                                  const ModelParams& params,
                                  std::span<const Observation> batch,
                                  double rho1, double rho2, double batch_scale);

ModelParams project_ball(ModelParams params, double radius);
// In-place variant; also sets params.radius().
void project_ball_inplace(ModelParams& params, double radius);
// Rescales only the listed rows.
void project_rows(ModelParams& params, std::span<const std::uint32_t> entity_rows,
                  std::span<const std::uint32_t> relation_rows, double radius);

// Keeps the `cap` largest |x| over the flattened vector (ties go to the lower
// flat index) and zeroes the rest.
ModelParams project_l0(ModelParams params, std::size_t cap);
void project_l0_inplace(ModelParams& params, std::size_t cap);

std::size_t count_nonzeros(const ModelParams& params);

struct TrainResult {
  ModelParams params;
  double initial_objective = 0.0;
  // Full-data penalized objective after each epoch.
  std::vector<double> objective_trace;
  // Nonzero count after each epoch's projections.
  std::vector<std::size_t> nonzero_trace;
};

// Ball-constrained (and optionally L0-capped) AdaGrad ascent on the
// penalized log-likelihood. Deterministic given config.seed.
TrainResult train(const ScoreModel& model, const ObservationSet& obs,
                  const TrainConfig& config);
// Same, starting from `init` instead of the random initialization.
TrainResult train_from(const ScoreModel& model, const ObservationSet& obs,
                       const TrainConfig& config, ModelParams init);

// The random starting point used by train(): uniform on
// [-init_scale, init_scale], then projected onto the ball.
ModelParams initial_params(const ScoreModel& model, const NetworkShape& shape,
                           const TrainConfig& config);

}  // namespace mrnet

#endif  // MRNET_ESTIMATION_H_
