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

#include "mrnet/bounds.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "mrnet/errors.h"
#include "mrnet/evaluation.h"
#include "mrnet/model.h"

namespace mrnet {

void BoundInputs::validate() const {
  if (!(n > 0.0)) throw DomainError("bound inputs: n must be positive");
  if (!(m >= 1.0)) throw DomainError("bound inputs: m must be >= 1");
  if (!(sup_score >= 2.0)) throw DomainError("bound inputs: C must be >= 2");
  if (!(lipschitz > 0.0)) throw DomainError("bound inputs: alpha must be > 0");
  if (!(radius > 0.0)) throw DomainError("bound inputs: U must be > 0");
}

void LowerBoundInputs::validate() const {
  if (!(b > 0.0 && b < 1.0)) throw DomainError("lower bound: b must be in (0,1)");
  if (!(n > 0.0)) throw DomainError("lower bound: n must be positive");
  if (!(kappa > 0.0)) throw DomainError("lower bound: kappa must be positive");
  if (!(lipschitz > 0.0)) throw DomainError("lower bound: alpha must be > 0");
  if (kappa > lipschitz) {
    throw DomainError("lower bound: kappa cannot exceed alpha");
  }
  if (!(neighborhood_radius >= 0.0)) {
    throw DomainError("lower bound: r must be >= 0");
  }
}

double bennett_h(double u) {
  if (!(u >= 0.0)) throw DomainError("bennett_h: u must be >= 0");
  if (u == 0.0) return 0.0;
  if (u < 1e-4) {
    // sum_k (-1)^{k+1} u^k / (k (k + 1))
    return u * (0.5 - u * (1.0 / 6.0 - u * (1.0 / 12.0 - u / 20.0)));
  }
  if (std::isinf(u)) return std::numeric_limits<double>::infinity();
  return (1.0 + 1.0 / u) * std::log1p(u) - 1.0;
}

namespace {

double log_add_exp(double a, double b) {
  const double hi = std::max(a, b);
  if (hi == -std::numeric_limits<double>::infinity()) return hi;
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

}  // namespace

TailBound tail_bound(const BoundInputs& in, double t, double s, double beta) {
  in.validate();
  if (!(t > 0.0)) throw DomainError("tail_bound: t must be > 0");
  const double nt = in.n * t;
  if (!(s > 0.0 && s < nt)) throw DomainError("tail_bound: need 0 < s < n t");
  if (!(beta > 0.0)) throw DomainError("tail_bound: beta must be > 0");

  TailBound r;
  const double covering = 2.0 * std::numbers::sqrt3 * in.lipschitz * in.radius *
                          in.n * (1.0 + beta) / s;
  r.log_covering_term = -((nt - s) / in.sup_score) *
                            bennett_h(0.5 - s / (2.0 * nt)) +
                        in.m * std::log1p(covering);
  r.log_count_term = -in.n * beta * bennett_h(beta);
  r.log_value = log_add_exp(r.log_covering_term, r.log_count_term);
  r.value = std::exp(r.log_value);
  r.vacuous = r.log_value >= 0.0;
  return r;
}

TailBound tail_bound(const BoundInputs& in, double t) {
  in.validate();
  return tail_bound(in, t, 0.5 * in.n * t, 1.0 + t);
}

RiskBound risk_bound(const BoundInputs& in) {
  in.validate();
  RiskBound r;
  r.c1 = 18.0 * in.sup_score;
  r.c2 = 8.0 * std::numbers::sqrt3 * in.lipschitz * in.radius;
  r.c3 = 2.0 * std::max(r.c1, r.c2);
  const double ratio = in.n / in.m;
  if (!(ratio >= r.c2 + std::numbers::e)) {
    throw DomainError("risk_bound: condition n/m >= C2 + e fails (n/m = " +
                      std::to_string(ratio) +
                      ", C2 + e = " + std::to_string(r.c2 + std::numbers::e) +
                      ")");
  }
  const double log_ratio = std::log(ratio);
  r.leading = r.c3 * log_ratio / ratio;
  r.value = r.leading + (r.c1 / in.n) * std::exp(-in.m * log_ratio) +
            (3.0 / in.n) *
                std::exp(-(in.n + r.c3 * in.m * log_ratio) / 3.0);
  return r;
}

MinimaxLower minimax_lower(const LowerBoundInputs& in) {
  in.validate();
  MinimaxLower r;
  const double spread = in.b * (1.0 - in.b);
  const double alpha_sq = in.lipschitz * in.lipschitz;
  r.c_tilde = in.kappa * in.kappa * spread / (108.0 * alpha_sq);
  const double excess = in.m / 16.0 - 1.0;
  if (!(excess > 0.0)) {
    r.vacuous = true;
    r.r_condition_ok = true;
    return r;
  }
  r.risk_lower = r.c_tilde * excess / (2.0 * in.n);
  r.tail_threshold = r.c_tilde * excess / in.n;
  r.required_radius_sq = excess * spread / (12.0 * alpha_sq * in.n);
  r.r_condition_ok =
      in.neighborhood_radius * in.neighborhood_radius >= r.required_radius_sq;
  return r;
}

bool check_variance_inequality(double x, double y, double c) {
  if (!(std::abs(x) <= c && std::abs(y) <= c)) {
    throw DomainError("check_variance_inequality: need |x|, |y| <= C");
  }
  const double sx = logistic(x);
  const double lhs = sx * (1.0 - sx) * (y - x) * (y - x);
  const double rhs = 2.0 * std::max(c, 2.0) * bernoulli_kl(sx, logistic(y));
  return lhs <= rhs + 1e-12;
}

bool check_kl_quadratic_upper(double p, double q) {
  if (!(p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0)) {
    throw DomainError("check_kl_quadratic_upper: need p, q in (0, 1)");
  }
  return bernoulli_kl(p, q) <= (p - q) * (p - q) / (q * (1.0 - q)) + 1e-12;
}

}  // namespace mrnet
