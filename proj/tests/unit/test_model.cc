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

#include <cfloat>
#include <cmath>
#include <random>

#include "doctest.h"
#include "mrnet/errors.h"
#include "mrnet/model.h"
#include "test_util.h"

using namespace mrnet;
using mrnet::testing::kAllKinds;
using mrnet::testing::random_params;

namespace {

ModelParams one_pair(const ScoreModel& model, std::vector<double> head,
                     std::vector<double> tail, std::vector<double> rel) {
  ModelParams x = ModelParams::zeros(model, 2, 1, 100.0);
  std::copy(head.begin(), head.end(), x.entity(0).begin());
  std::copy(tail.begin(), tail.end(), x.entity(1).begin());
  std::copy(rel.begin(), rel.end(), x.relation(0).begin());
  return x;
}

}  // namespace

TEST_CASE("relation dimension per kind") {
  CHECK(ScoreModel{ScoreKind::kDistance, 4}.relation_dim() == 5);
  CHECK(ScoreModel{ScoreKind::kBilinear, 4}.relation_dim() == 4);
  CHECK(ScoreModel{ScoreKind::kCombinedQuadratic, 4}.relation_dim() == 8);
  CHECK(ScoreModel{ScoreKind::kDistance, 2}.dimension(10, 3) == 29);
}

TEST_CASE("network shape") {
  const NetworkShape s{4, 3, 0.5};
  CHECK(s.n_edges() == 48);
  CHECK(s.expected_observations() == 24.0);
  for (std::uint64_t i = 0; i < s.n_edges(); ++i) {
    CHECK(s.edge_index(s.triple_at(i)) == i);
  }
  CHECK_THROWS_AS((NetworkShape{0, 1, 0.1}.validate()), DomainError);
  CHECK_THROWS_AS((NetworkShape{1, 1, 1.5}.validate()), DomainError);
}

TEST_CASE("score kind names") {
  CHECK(parse_score_kind("distance") == ScoreKind::kDistance);
  CHECK(parse_score_kind("combined_quadratic") == ScoreKind::kCombinedQuadratic);
  CHECK(to_string(ScoreKind::kBilinear) == "bilinear");
  CHECK_THROWS_AS(parse_score_kind("rescal"), DomainError);
}

TEST_CASE("hand-computed scores") {
  const ScoreModel dist{ScoreKind::kDistance, 2};
  const ModelParams xd = one_pair(dist, {1, 0}, {0, 0}, {-1, 0, 3});
  CHECK(score(dist, xd, {0, 1, 0}) == 3.0);
  CHECK(score_gradient(dist, xd, {0, 1, 0}).rel[2] == 1.0);
  CHECK(edge_probability(dist, xd, {0, 1, 0}) ==
        doctest::Approx(0.95257412682243321912).epsilon(1e-15));

  const ScoreModel bil{ScoreKind::kBilinear, 2};
  const ModelParams xb = one_pair(bil, {1, 0}, {1, 0}, {2, 5});
  CHECK(score(bil, xb, {0, 1, 0}) == 2.0);
  const ScoreGradient gb = score_gradient(bil, xb, {0, 1, 0});
  CHECK(gb.rel == std::vector<double>{1.0, 0.0});

  const ScoreModel comb{ScoreKind::kCombinedQuadratic, 2};
  // theta_i + a - theta_j = (1, 1), b = (2, -1).
  const ModelParams xc = one_pair(comb, {0.5, 2}, {0, 1}, {0.5, 0, 2, -1});
  CHECK(score(comb, xc, {0, 1, 0}) == doctest::Approx(1.0));
}

TEST_CASE("layout and edge checks") {
  const ScoreModel bil{ScoreKind::kBilinear, 2};
  const ScoreModel dist{ScoreKind::kDistance, 2};
  const ModelParams x = ModelParams::zeros(bil, 3, 2, 1.0);
  CHECK_THROWS_AS(score(dist, x, {0, 0, 0}), ShapeError);
  CHECK_THROWS_AS(score(bil, x, {3, 0, 0}), ShapeError);
  CHECK_THROWS_AS(score(bil, x, {0, 0, 2}), ShapeError);
}

TEST_CASE("logistic is overflow safe and inside (0, 1)") {
  CHECK(logistic(0.0) == 0.5);
  const double hi = logistic(700.0);
  CHECK(hi < 1.0);
  CHECK(hi > 1.0 - 1e-12);
  const double lo = logistic(-800.0);
  CHECK(lo > 0.0);
  CHECK(std::isfinite(logistic(-1e308)));
  double prev = 0.0;
  for (double x = -40; x <= 40; x += 0.25) {
    const double p = logistic(x);
    CHECK(p >= prev);
    prev = p;
  }
  CHECK(softplus(1000.0) == doctest::Approx(1000.0));
  CHECK(softplus(-1000.0) >= 0.0);
  CHECK(softplus(0.0) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("gradients match central differences") {
  Engine engine(11);
  const double h = 1e-5;
  for (ScoreKind kind : kAllKinds) {
    const ScoreModel model{kind, 3};
    for (int draw = 0; draw < 100; ++draw) {
      ModelParams x = random_params(model, 4, 2, 1.0, 100.0, engine);
      std::uniform_int_distribution<std::uint32_t> ent(0, 3), rel(0, 1);
      const Triple e{ent(engine), ent(engine), rel(engine)};
      const ScoreGradient g = score_gradient(model, x, e);
      auto fd = [&](std::span<double> row, std::size_t l) {
        const double keep = row[l];
        row[l] = keep + h;
        const double up = score(model, x, e);
        row[l] = keep - h;
        const double down = score(model, x, e);
        row[l] = keep;
        return (up - down) / (2 * h);
      };
      auto close = [](double a, double b) {
        const double scale = std::max(std::abs(a), std::abs(b));
        return scale > 1e-3 ? std::abs(a - b) <= 1e-5 * scale
                            : std::abs(a - b) <= 1e-8;
      };
      for (std::size_t l = 0; l < 3; ++l) {
        if (e.head == e.tail) {
          CHECK(close(fd(x.entity(e.head), l), g.head[l] + g.tail[l]));
        } else {
          CHECK(close(fd(x.entity(e.head), l), g.head[l]));
          CHECK(close(fd(x.entity(e.tail), l), g.tail[l]));
        }
      }
      for (std::size_t l = 0; l < model.relation_dim(); ++l) {
        CHECK(close(fd(x.relation(e.rel), l), g.rel[l]));
      }
    }
  }
}

TEST_CASE("sup and Lipschitz bounds") {
  CHECK(score_sup_bound({ScoreKind::kDistance, 3}, 1.0) == 10.0);
  CHECK(score_sup_bound({ScoreKind::kBilinear, 3}, 1.0) == 2.0);
  CHECK(score_sup_bound({ScoreKind::kCombinedQuadratic, 3}, 2.0) == 72.0);
  CHECK(lipschitz_bound({ScoreKind::kDistance, 3}, 1e-9) >= 1.0);
  CHECK(lipschitz_bound({ScoreKind::kBilinear, 3}, 1e-9) >= 0.0);
  CHECK_THROWS_AS(score_sup_bound({ScoreKind::kDistance, 3}, 0.0), DomainError);
  CHECK_THROWS_AS(lipschitz_bound({ScoreKind::kBilinear, 3}, 0.0), DomainError);
  CHECK_THROWS_AS(lipschitz_bound({ScoreKind::kBilinear, 3}, -1.0), DomainError);
}

TEST_CASE("sampled points respect the sup and Lipschitz bounds") {
  Engine engine(12);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (ScoreKind kind : kAllKinds) {
    for (double radius : {0.5, 1.0, 2.0}) {
      const ScoreModel model{kind, 3};
      const double c = score_sup_bound(model, radius);
      const double alpha = lipschitz_bound(model, radius);
      const std::size_t de = model.entity_dim(), dr = model.relation_dim();
      auto draw_point = [&](bool on_sphere) {
        std::vector<double> p(2 * de + dr);
        auto fill = [&](std::size_t from, std::size_t len) {
          double norm = 0.0;
          for (std::size_t l = 0; l < len; ++l) {
            p[from + l] = unit(engine);
            norm += p[from + l] * p[from + l];
          }
          norm = std::sqrt(norm);
          const double target = on_sphere ? radius : radius * std::abs(unit(engine));
          for (std::size_t l = 0; l < len; ++l) p[from + l] *= target / norm;
        };
        fill(0, de);
        fill(de, de);
        fill(2 * de, dr);
        return p;
      };
      auto phi = [&](const std::vector<double>& p) {
        return score_rows(kind, {p.data(), de}, {p.data() + de, de},
                          {p.data() + 2 * de, dr});
      };
      for (int i = 0; i < 10000; ++i) {
        const auto u = draw_point(i % 2 == 0);
        const auto v = draw_point(i % 3 == 0);
        double dist = 0.0;
        for (std::size_t l = 0; l < u.size(); ++l) {
          dist += (u[l] - v[l]) * (u[l] - v[l]);
        }
        const double fu = phi(u), fv = phi(v);
        REQUIRE(std::abs(fu) <= c);
        REQUIRE(std::abs(fu - fv) <= alpha * std::sqrt(dist) + 1e-12);
      }
    }
  }
}

TEST_CASE("distance scores are translation invariant") {
  Engine engine(13);
  const ScoreModel model{ScoreKind::kDistance, 3};
  ModelParams x = random_params(model, 5, 2, 1.0, 100.0, engine);
  ModelParams moved = x;
  for (std::size_t i = 0; i < 5; ++i) {
    moved.entity(i)[0] += 0.7;
    moved.entity(i)[2] -= 1.3;
  }
  const NetworkShape s{5, 2, 1.0};
  for (std::uint64_t idx = 0; idx < s.n_edges(); ++idx) {
    const Triple t = s.triple_at(idx);
    CHECK(score(model, moved, t) == doctest::Approx(score(model, x, t)).epsilon(1e-12));
  }
}

TEST_CASE("params validate the ball and finiteness") {
  const ScoreModel model{ScoreKind::kBilinear, 2};
  ModelParams x = ModelParams::zeros(model, 2, 1, 1.0);
  CHECK_NOTHROW(x.validate());
  x.entity(0)[0] = 3.0;
  CHECK_THROWS_AS(x.validate(), DomainError);
  x.entity(0)[0] = std::nan("");
  CHECK_THROWS_AS(x.validate(), DomainError);
}
