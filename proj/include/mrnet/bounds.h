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

#ifndef MRNET_BOUNDS_H_
#define MRNET_BOUNDS_H_

// Executable forms of the finite-sample error bounds for the (penalized)
// MLE of M*, plus checkers for the two elementary inequalities behind them.

namespace mrnet {

struct BoundInputs {
  double n = 0.0;          // expected observations gamma N^2 K
  double m = 0.0;          // parameter dimension N d_E + K d_R (or m_tau)
  double sup_score = 2.0;  // C >= 2
  double lipschitz = 1.0;  // alpha > 0
  double radius = 1.0;     // U > 0
  double margin = 0.0;     // epsilon of the margin assumption, unused by the
                           // tail/risk formulas
  double obs_rate = 1.0;   // gamma

  // Throws DomainError unless n > 0, m >= 1, C >= 2, alpha > 0, U > 0.
  void validate() const;
};

struct LowerBoundInputs {
  double m = 0.0;
  double n = 0.0;
  double kappa = 0.0;      // local bi-Lipschitz constant of sigma(phi)
  double b = 0.5;          // sup of sigma(phi) over the neighbourhood
  double lipschitz = 1.0;  // alpha
  double neighborhood_radius = 0.0;  // r

  void validate() const;
};

// h(u) = (1 + 1/u) log(1 + u) - 1, with h(0) = 0.
double bennett_h(double u);

struct TailBound {
  double value = 0.0;        // may be +inf when the covering term overflows
  double log_value = 0.0;    // log of value, always finite for finite inputs
  double log_covering_term = 0.0;
  double log_count_term = 0.0;
  bool vacuous = false;      // value >= 1
};

// Upper bound on P(L(M_hat, M*) >= t); requires 0 < s < n t and beta > 0.
TailBound tail_bound(const BoundInputs& in, double t, double s, double beta);
// Uses s = n t / 2 and beta = 1 + t.
TailBound tail_bound(const BoundInputs& in, double t);

struct RiskBound {
  double value = 0.0;
  double leading = 0.0;  // C3 (m/n) log(n/m)
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
};

// Upper bound on E[L(M_hat, M*)]; requires n/m >= C2 + e.
RiskBound risk_bound(const BoundInputs& in);

struct MinimaxLower {
  double c_tilde = 0.0;
  double risk_lower = 0.0;          // C~ (m/16 - 1) / (2n)
  double tail_threshold = 0.0;      // C~ (m/16 - 1) / n
  double required_radius_sq = 0.0;  // (m/16 - 1) b (1 - b) / (12 alpha^2 n)
  bool r_condition_ok = false;
  bool vacuous = false;             // m <= 16
};

MinimaxLower minimax_lower(const LowerBoundInputs& in);

// sigma(x)(1 - sigma(x))(y - x)^2 <= 2 max{C, 2} D(sigma(x) || sigma(y)),
// for |x|, |y| <= C. Slack 1e-12.
bool check_variance_inequality(double x, double y, double c);
// D(p || q) <= (p - q)^2 / (q (1 - q)) for p, q in (0, 1). Slack 1e-12.
bool check_kl_quadratic_upper(double p, double q);

}  // namespace mrnet

#endif  // MRNET_BOUNDS_H_
