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

#ifndef MRNET_TESTS_UNIT_TEST_UTIL_H_
#define MRNET_TESTS_UNIT_TEST_UTIL_H_

#include <random>

#include "mrnet/estimation.h"
#include "mrnet/model.h"
#include "mrnet/rng.h"

namespace mrnet::testing {

inline ModelParams random_params(const ScoreModel& model, std::size_t n,
                                 std::size_t k, double sd, double radius,
                                 Engine& engine) {
  ModelParams x = ModelParams::zeros(model, n, k, radius);
  std::normal_distribution<double> normal(0.0, sd);
  for (double& v : x.flat()) v = normal(engine);
  project_ball_inplace(x, radius);
  return x;
}

inline constexpr ScoreKind kAllKinds[] = {ScoreKind::kDistance,
                                          ScoreKind::kBilinear,
                                          ScoreKind::kCombinedQuadratic};

}  // namespace mrnet::testing

#endif  // MRNET_TESTS_UNIT_TEST_UTIL_H_
