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

#ifndef MRNET_IO_H_
#define MRNET_IO_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mrnet/estimation.h"
#include "mrnet/evaluation.h"
#include "mrnet/model.h"
#include "mrnet/simulation.h"

namespace mrnet {

// Name <-> dense index, in first-appearance order.
class Vocabulary {
 public:
  std::uint32_t intern(std::string_view name);
  std::optional<std::uint32_t> find(std::string_view name) const;
  const std::string& name(std::uint32_t index) const { return names_[index]; }
  std::size_t size() const { return names_.size(); }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

enum class Field { kHead, kRelation, kTail };

// Meaning of the three tab-separated columns.
struct ColumnOrder {
  std::array<Field, 3> fields{Field::kHead, Field::kRelation, Field::kTail};

  // "hrt", "htr", or any other permutation of the letters h, r, t.
  static ColumnOrder parse(std::string_view code);
};

struct TripleDataset {
  Vocabulary entity_vocab;
  Vocabulary relation_vocab;
  std::vector<Triple> positives;
  std::vector<Triple> negatives;
  std::size_t duplicate_count = 0;

  NetworkShape shape() const {
    return {entity_vocab.size(), relation_vocab.size(), 1.0};
  }
};

// Reads one triple file, growing the vocabularies of `dataset` (so several
// splits share one index space). Lines must hold exactly three tab-separated
// fields; blank lines are skipped; repeated triples are dropped and added to
// `dataset.duplicate_count`. The caller decides which list receives them.
std::vector<Triple> read_triples(std::istream& in, const ColumnOrder& order,
                                 TripleDataset& dataset);
std::vector<Triple> read_triples_file(const std::filesystem::path& path,
                                      const ColumnOrder& order,
                                      TripleDataset& dataset);

// Fresh dataset from one file; throws ParseError (with line) on malformed
// lines and DomainError on a file with no triples.
TripleDataset load_triples(const std::filesystem::path& path,
                           const ColumnOrder& order = {});

// ceil(ratio |positives|) distinct triples drawn uniformly from Lambda,
// avoiding the positives; labelled 0.
std::vector<Observation> sample_negatives(std::span<const Triple> positives,
                                          double ratio,
                                          const NetworkShape& shape,
                                          std::uint64_t seed);

// Text checkpoint:
//   MRNCKPT 1
//   <kind> <d> <N> <K> <U>
//   N entity rows, then K relation rows (17 significant digits).
void write_checkpoint(std::ostream& out, const ModelParams& params,
                      const ScoreModel& model);
void save_checkpoint(const ModelParams& params, const ScoreModel& model,
                     const std::filesystem::path& path);

struct Checkpoint {
  ScoreModel model;
  ModelParams params;
};
Checkpoint read_checkpoint(std::istream& in);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Flat `key = value` configuration with optional [section] headers. Keys
// before the first header are global and visible from every section.
// `#` starts a comment.
class Config {
 public:
  static Config parse(std::istream& in);
  static Config load(const std::filesystem::path& path);

  bool has(std::string_view section, std::string_view key) const;
  std::optional<std::string> find(std::string_view section,
                                  std::string_view key) const;
  std::string get(std::string_view section, std::string_view key,
                  std::string_view fallback) const;
  std::string require(std::string_view section, std::string_view key) const;
  double get_double(std::string_view section, std::string_view key,
                    double fallback) const;
  std::int64_t get_int(std::string_view section, std::string_view key,
                       std::int64_t fallback) const;
  bool get_bool(std::string_view section, std::string_view key,
                bool fallback) const;
  std::vector<double> get_doubles(std::string_view section,
                                  std::string_view key,
                                  std::vector<double> fallback) const;
  std::vector<std::int64_t> get_ints(std::string_view section,
                                     std::string_view key,
                                     std::vector<std::int64_t> fallback) const;
  void set(std::string_view section, std::string_view key,
           std::string_view value);

 private:
  std::map<std::string, std::map<std::string, std::string, std::less<>>,
           std::less<>>
      sections_;
};

// Reads the TrainConfig keys of `section`, defaults from TrainConfig{}.
TrainConfig train_config_from(const Config& config, std::string_view section);

// Metrics use 9 significant digits.
std::string format_metric(double value);

inline constexpr std::string_view kGridCsvHeader =
    "n_entities,obs_rate,replicate,avg_kl,mse_phi,link_err,seconds";
void write_grid_csv(std::ostream& out, std::span<const GridRow> rows);

// `metric,value` rows: mr_e, mrr_e, hits_e@q..., mr_r, mrr_r, hits_r@q...,
// then avg_kl, mse_phi, link_err, n_evaluated when `losses` is given.
void write_eval_csv(std::ostream& out, const RankReport& ranks,
                    const EvalReport* losses);

}  // namespace mrnet

#endif  // MRNET_IO_H_
