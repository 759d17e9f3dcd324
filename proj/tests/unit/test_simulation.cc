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

#include <algorithm>
#include <cmath>
#include <set>

#include <boost/math/distributions/chi_squared.hpp>

#include "doctest.h"
#include "mrnet/errors.h"
#include "mrnet/simulation.h"

using namespace mrnet;

namespace {

// Bilinear d=1 parameters with every score equal to `phi`.
ModelParams constant_score(std::size_t n, std::size_t k, double phi) {
  const ScoreModel model{ScoreKind::kBilinear, 1};
  ModelParams x = ModelParams::zeros(model, n, k, std::max(1.0, std::abs(phi)));
  for (std::size_t i = 0; i < n; ++i) x.entity(i)[0] = 1.0;
  for (std::size_t r = 0; r < k; ++r) x.relation(r)[0] = phi;
  return x;
}

constexpr ScoreModel kBil{ScoreKind::kBilinear, 1};

}  // namespace

TEST_CASE("truncated normal variance") {
  Engine engine(1);
  double sum = 0.0, sq = 0.0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const double v = truncated_normal(engine, 0.5, 20.0);
    CHECK(std::abs(v) <= 20.0);
    sum += v;
    sq += v * v;
  }
  const double mean = sum / draws;
  const double var = sq / draws - mean * mean;
  CHECK(var >= 0.24);
  CHECK(var <= 0.26);
}

TEST_CASE("generate_truth is deterministic and feasible") {
  GenSpec g;
  g.model = {ScoreKind::kDistance, 3};
  g.shape = {20, 4, 0.1};
  g.seed = 42;
  const ModelParams a = generate_truth(g);
  CHECK(a == generate_truth(g));
  CHECK(a.radius() == doctest::Approx(20.0 * std::sqrt(4.0)));
  CHECK_NOTHROW(a.validate());
  g.seed = 43;
  CHECK_FALSE(a == generate_truth(g));
  g.entity_sd = 0.0;
  CHECK_THROWS_AS(generate_truth(g), DomainError);
}

TEST_CASE("labels: saturation, determinism, constant rate") {
  const ModelParams hot = constant_score(10, 2, 50.0);
  const NetworkSample s = sample_network(kBil, hot, 7);
  const NetworkShape shape{10, 2, 1.0};
  for (std::uint64_t i = 0; i < shape.n_edges(); ++i) {
    CHECK(s.label(shape.triple_at(i)) == 1);
  }

  const double phi = std::log(0.3 / 0.7);
  const ModelParams warm = constant_score(100, 10, phi);
  const NetworkSample t = sample_network(kBil, warm, 8);
  const NetworkSample t2 = sample_network(kBil, warm, 8);
  const NetworkShape big{100, 10, 1.0};
  double ones = 0.0;
  for (std::uint64_t i = 0; i < big.n_edges(); ++i) {
    const Triple e = big.triple_at(i);
    const auto y = t.label(e);
    ones += y;
    if (i % 97 == 0) CHECK(t2.label(e) == y);
  }
  const double mean = ones / static_cast<double>(big.n_edges());
  CHECK(mean >= 0.29);
  CHECK(mean <= 0.31);
  CHECK(t.probability({0, 0, 0}) == doctest::Approx(0.3));
}

TEST_CASE("observation masks do not change labels") {
  const ModelParams x = constant_score(12, 2, 0.1);
  const NetworkSample labels = sample_network(kBil, x, 3);
  const NetworkShape shape{12, 2, 0.5};
  const ObservationSet a = sample_observations(shape, labels, 1);
  const ObservationSet b = sample_observations(shape, labels, 2);
  for (const Observation& o : a.items()) CHECK(o.label == labels.label(o.edge));
  for (const Observation& o : b.items()) CHECK(o.label == labels.label(o.edge));
  CHECK_FALSE(std::equal(a.items().begin(), a.items().end(), b.items().begin(),
                         b.items().end(), [](const auto& p, const auto& q) {
                           return p.edge == q.edge;
                         }));
}

TEST_CASE("observation extremes and counts") {
  const ModelParams x = constant_score(100, 20, 0.0);
  const NetworkSample labels = sample_network(kBil, x, 4);
  CHECK(sample_observations({100, 20, 0.0}, labels, 1).empty());
  CHECK(sample_observations({100, 20, 1.0}, labels, 1).size() == 200000);
  int inside = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t n = sample_observations({100, 20, 0.01}, labels, seed).size();
    inside += n >= 1800 && n <= 2200;
  }
  CHECK(inside >= 99);
  CHECK_THROWS_AS(sample_observations({50, 20, 0.1}, labels, 1), ShapeError);
}

TEST_CASE("sample_distinct: both strategies") {
  Engine engine(9);
  for (std::uint64_t pop : {std::uint64_t{50}, std::uint64_t{1} << 30}) {
    const auto v = sample_distinct(pop, 40, engine);
    CHECK(v.size() == 40);
    CHECK(std::is_sorted(v.begin(), v.end()));
    CHECK(std::adjacent_find(v.begin(), v.end()) == v.end());
    CHECK(v.back() < pop);
  }
  CHECK(sample_distinct(5, 5, engine) == std::vector<std::uint64_t>{0, 1, 2, 3, 4});
  CHECK_THROWS_AS(sample_distinct(3, 4, engine), DomainError);
}

TEST_CASE("binomial-then-uniform matches per-edge coin flips") {
  // |Lambda| = 12: N = 2, K = 3.
  const ModelParams x = constant_score(2, 3, 0.0);
  const NetworkSample labels = sample_network(kBil, x, 5);
  const NetworkShape shape{2, 3, 0.35};
  const int draws = 10000;
  std::vector<double> a(13, 0.0), b(13, 0.0);
  std::vector<double> edge_a(12, 0.0), edge_b(12, 0.0);
  for (int i = 0; i < draws; ++i) {
    const auto s1 = sample_observations(shape, labels, 1000 + i);
    const auto s2 = sample_observations_per_edge(shape, labels, 1000 + i);
    a[s1.size()] += 1;
    b[s2.size()] += 1;
    for (const auto& o : s1.items()) edge_a[shape.edge_index(o.edge)] += 1;
    for (const auto& o : s2.items()) edge_b[shape.edge_index(o.edge)] += 1;
  }
  // Two-sample chi-square on the |S| histogram, sparse bins pooled.
  double stat = 0.0;
  int bins = 0;
  double pa = 0.0, pb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    pa += a[k];
    pb += b[k];
    if (pa + pb < 20 && k + 1 < a.size()) continue;
    const double e = (pa + pb) / 2.0;
    stat += (pa - e) * (pa - e) / e + (pb - e) * (pb - e) / e;
    ++bins;
    pa = pb = 0.0;
  }
  const boost::math::chi_squared dist(bins - 1);
  const double p = boost::math::cdf(boost::math::complement(dist, stat));
  CHECK(p > 1e-4);
  for (std::size_t e = 0; e < 12; ++e) {
    CHECK(edge_a[e] / draws == doctest::Approx(0.35).epsilon(0.08));
    CHECK(edge_b[e] / draws == doctest::Approx(0.35).epsilon(0.08));
  }
}

TEST_CASE("training helps on a tiny fully observed network") {
  GenSpec g;
  g.model = {ScoreKind::kCombinedQuadratic, 2};
  g.shape = {8, 2, 1.0};
  g.seed = 77;
  const ModelParams truth = generate_truth(g);
  const ObservationSet obs =
      sample_observations(g.shape, sample_network(g.model, truth, 1), 2);
  TrainConfig c;
  c.radius = truth.radius();
  const TrainResult fit = train(g.model, obs, c);
  const double before =
      evaluate_losses(g.model, initial_params(g.model, g.shape, c), truth).avg_kl;
  const double after = evaluate_losses(g.model, fit.params, truth).avg_kl;
  CHECK(after < before);
}

TEST_CASE("run_grid: shape, reproducibility, failures, threads") {
  ExperimentGrid grid;
  grid.gen.model = {ScoreKind::kBilinear, 2};
  grid.gen.shape.n_relations = 2;
  grid.entity_counts = {5, 7};
  grid.obs_rates = {0.0, 0.8};
  grid.replicates = 3;
  grid.train.epochs = 10;
  grid.timing = false;
  const auto rows = run_grid(grid);
  REQUIRE(rows.size() == 12);
  CHECK(rows[0].n_entities == 5);
  CHECK(rows[0].obs_rate == 0.0);
  CHECK(rows[0].failed);
  CHECK(std::isnan(rows[0].avg_kl));
  CHECK(rows[3].obs_rate == 0.8);
  CHECK_FALSE(rows[3].failed);
  CHECK(rows[3].replicate == 0);
  CHECK(rows[4].replicate == 1);
  CHECK(rows[3].avg_kl != rows[4].avg_kl);
  CHECK(rows[11].n_entities == 7);

  grid.threads = 3;
  const auto again = run_grid(grid);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(again[i].n_observed == rows[i].n_observed);
    if (!rows[i].failed) CHECK(again[i].avg_kl == rows[i].avg_kl);
  }

  const ReplicateSeeds s0 = replicate_seeds(1, 0, 0), s1 = replicate_seeds(1, 0, 1);
  CHECK(s0.mask != s1.mask);
  CHECK(s0.truth != s1.truth);
  CHECK(s0.labels != s0.mask);
}

TEST_CASE("run_grid subsamples evaluation above the cap") {
  ExperimentGrid grid;
  grid.gen.model = {ScoreKind::kDistance, 2};
  grid.gen.shape.n_relations = 1;
  grid.entity_counts = {10};
  grid.obs_rates = {1.0};
  grid.train.epochs = 5;
  grid.eval_cap = 50;
  const auto rows = run_grid(grid);
  CHECK(rows[0].subsampled);
  CHECK(rows[0].n_evaluated == 50);
  CHECK(rows[0].seconds > 0.0);
  grid.entity_counts = {};
  CHECK_THROWS_AS(run_grid(grid), DomainError);
}
