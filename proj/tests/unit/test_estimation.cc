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

#include <cmath>
#include <random>

#include "doctest.h"
#include "mrnet/errors.h"
#include "mrnet/estimation.h"
#include "mrnet/simulation.h"
#include "test_util.h"

using namespace mrnet;
using mrnet::testing::kAllKinds;
using mrnet::testing::random_params;

namespace {

ObservationSet all_observed(const ScoreModel& model, const ModelParams& truth,
                            std::uint64_t seed) {
  const NetworkShape shape{truth.n_entities(), truth.n_relations(), 1.0};
  return sample_observations(shape, sample_network(model, truth, seed), seed);
}

}  // namespace

TEST_CASE("observation sets reject bad input") {
  const NetworkShape s{2, 1, 1.0};
  CHECK_THROWS_AS(ObservationSet(s, {{{0, 0, 0}, 2}}), DomainError);
  CHECK_THROWS_AS(ObservationSet(s, {{{0, 2, 0}, 1}}), ShapeError);
  CHECK_THROWS_AS(ObservationSet(s, {{{0, 1, 0}, 1}, {{0, 1, 0}, 0}}),
                  DomainError);
  CHECK(ObservationSet(s, {}).empty());
}

TEST_CASE("log-likelihood examples") {
  const ScoreModel model{ScoreKind::kBilinear, 1};
  ModelParams x = ModelParams::zeros(model, 2, 1, 10.0);
  const NetworkShape s{2, 1, 1.0};
  CHECK(log_likelihood(model, x, ObservationSet(s, {{{0, 1, 0}, 1}})) ==
        doctest::Approx(-0.6931471805599453));
  CHECK(log_likelihood(model, x, ObservationSet(s, {})) == 0.0);
  // phi = 2 on relation 0 (Y = 1) and -2 on relation 1 (Y = 0).
  ModelParams y = ModelParams::zeros(model, 2, 2, 10.0);
  y.entity(0)[0] = 1.0;
  y.entity(1)[0] = 2.0;
  y.relation(0)[0] = 1.0;
  y.relation(1)[0] = -1.0;
  const NetworkShape s2{2, 2, 1.0};
  const ObservationSet obs(s2, {{{0, 1, 0}, 1}, {{0, 1, 1}, 0}});
  CHECK(log_likelihood(model, y, obs) ==
        doctest::Approx(-0.25385602208594499289).epsilon(1e-14));
}

TEST_CASE("penalized objective") {
  const ScoreModel model{ScoreKind::kBilinear, 1};
  Engine engine(3);
  const ModelParams truth = random_params(model, 4, 2, 1.0, 5.0, engine);
  const ObservationSet obs = all_observed(model, truth, 9);
  CHECK(penalized_objective(model, truth, obs, 0, 0) ==
        log_likelihood(model, truth, obs));
  const ModelParams zero = ModelParams::zeros(model, 4, 2, 5.0);
  CHECK(penalized_objective(model, zero, obs, 3, 4) ==
        log_likelihood(model, zero, obs));

  const ObservationSet empty(NetworkShape{1, 1, 1.0}, {});
  ModelParams one = ModelParams::zeros(model, 1, 1, 10.0);
  one.entity(0)[0] = -2.0;
  CHECK(penalized_objective(model, one, empty, 1, 1) == -6.0);
}

TEST_CASE("gradient: hand example and perfect fit") {
  const ScoreModel model{ScoreKind::kBilinear, 1};
  ModelParams x = ModelParams::zeros(model, 2, 1, 10.0);
  x.entity(0)[0] = 1.0;
  x.entity(1)[0] = 1.0;
  const std::vector<Observation> batch{{{0, 1, 0}, 1}};
  const SparseGradient g = objective_gradient(model, x, batch, 0, 0, 1);
  REQUIRE(g.relation_rows == std::vector<std::uint32_t>{0});
  CHECK(g.relation_grad[0] == doctest::Approx(0.5));
  CHECK(g.entity_rows == std::vector<std::uint32_t>{0, 1});
}

TEST_CASE("dense gradient matches finite differences of the objective") {
  Engine engine(5);
  for (ScoreKind kind : kAllKinds) {
    const ScoreModel model{kind, 2};
    const ModelParams truth = random_params(model, 4, 2, 0.8, 50.0, engine);
    const ObservationSet obs = all_observed(model, truth, 17);
    ModelParams x = random_params(model, 4, 2, 0.8, 50.0, engine);
    for (double& v : x.flat()) {
      if (std::abs(v) < 1e-2) v = 0.05;
    }
    const double rho1 = 0.3, rho2 = 0.2;
    const SparseGradient g =
        objective_gradient(model, x, obs.items(), rho1, rho2, 1.0);
    REQUIRE(g.entity_rows.size() == 4);
    REQUIRE(g.relation_rows.size() == 2);
    std::vector<double> dense(g.entity_grad);
    dense.insert(dense.end(), g.relation_grad.begin(), g.relation_grad.end());
    const double h = 1e-6;
    for (std::size_t c = 0; c < x.dimension(); ++c) {
      const double keep = x.flat()[c];
      x.flat()[c] = keep + h;
      const double up = penalized_objective(model, x, obs, rho1, rho2);
      x.flat()[c] = keep - h;
      const double down = penalized_objective(model, x, obs, rho1, rho2);
      x.flat()[c] = keep;
      const double fd = (up - down) / (2 * h);
      CHECK(dense[c] == doctest::Approx(fd).epsilon(1e-5).scale(1e-3));
    }
  }
}

TEST_CASE("minibatch gradients sum to the full-data gradient") {
  Engine engine(6);
  const ScoreModel model{ScoreKind::kDistance, 2};
  const ModelParams truth = random_params(model, 5, 2, 1.0, 50.0, engine);
  const ObservationSet obs = all_observed(model, truth, 23);
  const ModelParams x = random_params(model, 5, 2, 1.0, 50.0, engine);
  const SparseGradient full = objective_gradient(model, x, obs.items(), 0, 0, 1);
  std::vector<double> sum(x.dimension(), 0.0);
  const auto items = obs.items();
  const std::size_t parts = 4;
  const std::size_t size = (items.size() + parts - 1) / parts;
  for (std::size_t from = 0; from < items.size(); from += size) {
    const auto batch = items.subspan(from, std::min(size, items.size() - from));
    const double scale =
        static_cast<double>(items.size()) / static_cast<double>(batch.size());
    const SparseGradient g = objective_gradient(model, x, batch, 0, 0, scale);
    for (std::size_t r = 0; r < g.entity_rows.size(); ++r) {
      for (std::size_t l = 0; l < 2; ++l) {
        sum[x.entity_offset(g.entity_rows[r]) + l] +=
            g.entity_grad[r * 2 + l] * batch.size() / items.size();
      }
    }
    for (std::size_t r = 0; r < g.relation_rows.size(); ++r) {
      for (std::size_t l = 0; l < 3; ++l) {
        sum[x.relation_offset(g.relation_rows[r]) + l] +=
            g.relation_grad[r * 3 + l] * batch.size() / items.size();
      }
    }
  }
  std::vector<double> dense(full.entity_grad);
  dense.insert(dense.end(), full.relation_grad.begin(), full.relation_grad.end());
  for (std::size_t c = 0; c < dense.size(); ++c) {
    CHECK(sum[c] == doctest::Approx(dense[c]).epsilon(1e-12));
  }
}

TEST_CASE("project_ball") {
  const ScoreModel model{ScoreKind::kBilinear, 2};
  ModelParams x = ModelParams::zeros(model, 1, 1, 10.0);
  x.entity(0)[0] = 3.0;
  x.entity(0)[1] = 4.0;
  CHECK(project_ball(x, 10.0).entity(0)[0] == 3.0);
  const ModelParams p = project_ball(x, 1.0);
  CHECK(p.entity(0)[0] == doctest::Approx(0.6));
  CHECK(p.entity(0)[1] == doctest::Approx(0.8));
  CHECK(p.radius() == 1.0);
  CHECK(project_ball(p, 1.0) == p);
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("project_l0") {
  ModelParams x(2, 1, 1, 2, 10.0);
  const double v[] = {3, -5, 1, -1};
  std::copy(std::begin(v), std::end(v), x.flat().begin());
  const ModelParams kept = project_l0(x, 2);
  CHECK(std::vector<double>(kept.flat().begin(), kept.flat().end()) ==
        std::vector<double>{3, -5, 0, 0});
  CHECK(project_l0(x, 4) == x);
  CHECK(count_nonzeros(project_l0(x, 0)) == 0);
  // Ties: the lower flat index survives.
  const ModelParams tie = project_l0(x, 3);
  CHECK(std::vector<double>(tie.flat().begin(), tie.flat().end()) ==
        std::vector<double>{3, -5, 1, 0});
  CHECK(project_l0(kept, 2) == kept);
}

TEST_CASE("training: 1-D problem reaches a large score") {
  const ScoreModel model{ScoreKind::kBilinear, 1};
  const NetworkShape s{2, 1, 1.0};
  const ObservationSet obs(s, {{{0, 1, 0}, 1}});
  TrainConfig c;
  c.epochs = 500;
  c.radius = 100.0;
  c.init_scale = 0.5;
  const TrainResult fit = train(model, obs, c);
  CHECK(score(model, fit.params, {0, 1, 0}) > 2.0);
  CHECK(fit.objective_trace.size() == 500);
}

TEST_CASE("training is deterministic and improves the objective") {
  const ScoreModel model{ScoreKind::kCombinedQuadratic, 3};
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    GenSpec gen;
    gen.model = model;
    gen.shape = {30, 3, 1.0};
    gen.entity_sd = gen.shift_sd = gen.weight_sd = 0.5;
    gen.seed = seed;
    const ModelParams truth = generate_truth(gen);
    const ObservationSet obs = sample_observations(
        gen.shape, sample_network(model, truth, seed + 100), seed + 200);
    TrainConfig c;
    c.epochs = 50;
    c.seed = seed;
    c.radius = truth.radius();
    const TrainResult a = train(model, obs, c);
    CHECK(a.objective_trace.back() >= a.initial_objective);
    if (seed <= 2) {
      CHECK(train(model, obs, c).params == a.params);
    }
  }
}

TEST_CASE("training rejects bad input") {
  const ScoreModel model{ScoreKind::kBilinear, 1};
  const NetworkShape s{2, 1, 1.0};
  CHECK_THROWS_AS(train(model, ObservationSet(s, {}), TrainConfig{}), DomainError);
  TrainConfig c;
  c.rho1 = -1;
  CHECK_THROWS_AS(train(model, ObservationSet(s, {{{0, 1, 0}, 1}}), c),
                  DomainError);
  TrainConfig cap;
  cap.sparsity_cap = 100;
  CHECK_THROWS_AS(train(model, ObservationSet(s, {{{0, 1, 0}, 1}}), cap),
                  DomainError);
}

TEST_CASE("sparsity cap holds after every epoch") {
  const ScoreModel model{ScoreKind::kDistance, 2};
  Engine engine(8);
  const ModelParams truth = random_params(model, 8, 2, 1.0, 50.0, engine);
  const ObservationSet obs = all_observed(model, truth, 31);
  TrainConfig c;
  c.epochs = 20;
  c.sparsity_cap = 10;
  const TrainResult fit = train(model, obs, c);
  for (std::size_t nz : fit.nonzero_trace) CHECK(nz <= 10);
  CHECK(count_nonzeros(fit.params) <= 10);
}
