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

#ifndef MRNET_CLI_H_
#define MRNET_CLI_H_

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mrnet/estimation.h"
#include "mrnet/io.h"
#include "mrnet/model.h"

namespace mrnet {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;

enum class Mode { kSimulate, kTrain, kEvaluate, kBounds };

// Settings shared by the `train` and `evaluate` subcommands, read from the
// subcommand's section (falling back to global keys).
struct RunConfig {
  Mode mode = Mode::kTrain;
  ScoreModel model{ScoreKind::kCombinedQuadratic, 10};
  TrainConfig train;
  std::string train_path;
  std::string valid_path;
  std::string test_path;
  std::string negatives_path;
  ColumnOrder columns;
  double negative_ratio = 1.0;
  std::vector<int> hits_qs{1, 3, 10};
  std::string output;      // results file; empty = stdout
  std::string checkpoint;  // train: where to write; evaluate: what to read
  std::string truth_checkpoint;
  // Validation sweep (train with a valid split): every (d, rho2) pair.
  std::vector<std::size_t> sweep_dims;
  std::vector<double> sweep_rho2;

  // Throws ConfigError on bad values or missing input files.
  static RunConfig from(const Config& config, Mode mode);
};

// All splits loaded into one shared vocabulary, in the fixed order
// train, valid, test, negatives.
struct SplitData {
  TripleDataset dataset;
  std::vector<Triple> train;
  std::vector<Triple> valid;
  std::vector<Triple> test;
  KnownTriples all_valid;
};
SplitData load_splits(const RunConfig& run);

// Observations for training: train positives (label 1), explicit negatives,
// and `negative_ratio * |train|` sampled negatives (label 0).
ObservationSet training_observations(const SplitData& data,
                                     const RunConfig& run);

// Entry point behind the `mrnet` executable. args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);
int run_cli(int argc, const char* const* argv);

}  // namespace mrnet

#endif  // MRNET_CLI_H_
