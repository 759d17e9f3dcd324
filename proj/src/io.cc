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

#include "mrnet/io.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "mrnet/errors.h"
#include "mrnet/rng.h"

namespace mrnet {

std::uint32_t Vocabulary::intern(std::string_view name) {
  std::string key(name);
  auto it = index_.find(key);
  if (it != index_.end()) return it->second;
  const auto id = static_cast<std::uint32_t>(names_.size());
  names_.push_back(key);
  index_.emplace(std::move(key), id);
  return id;
}

std::optional<std::uint32_t> Vocabulary::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

ColumnOrder ColumnOrder::parse(std::string_view code) {
  ColumnOrder order;
  if (code.size() != 3) {
    throw ConfigError("column order must be a permutation of 'hrt', got '" +
                      std::string(code) + "'");
  }
  bool seen[3] = {false, false, false};
  for (std::size_t c = 0; c < 3; ++c) {
    Field f;
    switch (code[c]) {
      case 'h':
        f = Field::kHead;
        break;
      case 'r':
        f = Field::kRelation;
        break;
      case 't':
        f = Field::kTail;
        break;
      default:
        throw ConfigError("column order must be a permutation of 'hrt', got '" +
                          std::string(code) + "'");
    }
    const auto slot = static_cast<std::size_t>(f);
    if (seen[slot]) {
      throw ConfigError("column order repeats a field: '" + std::string(code) +
                        "'");
    }
    seen[slot] = true;
    order.fields[c] = f;
  }
  return order;
}

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

}  // namespace

std::vector<Triple> read_triples(std::istream& in, const ColumnOrder& order,
                                 TripleDataset& dataset) {
  std::vector<Triple> triples;
  std::unordered_set<Triple, TripleHash> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 3) {
      throw ParseError("expected 3 tab-separated fields, found " +
                           std::to_string(fields.size()),
                       line_no);
    }
    Triple t;
    for (std::size_t c = 0; c < 3; ++c) {
      if (fields[c].empty()) throw ParseError("empty field", line_no);
      switch (order.fields[c]) {
        case Field::kHead:
          t.head = dataset.entity_vocab.intern(fields[c]);
          break;
        case Field::kTail:
          t.tail = dataset.entity_vocab.intern(fields[c]);
          break;
        case Field::kRelation:
          t.rel = dataset.relation_vocab.intern(fields[c]);
          break;
      }
    }
    if (seen.insert(t).second) {
      triples.push_back(t);
    } else {
      ++dataset.duplicate_count;
    }
  }
  return triples;
}

std::vector<Triple> read_triples_file(const std::filesystem::path& path,
                                      const ColumnOrder& order,
                                      TripleDataset& dataset) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open triple file " + path.string());
  try {
    return read_triples(in, order, dataset);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

TripleDataset load_triples(const std::filesystem::path& path,
                           const ColumnOrder& order) {
  TripleDataset dataset;
  dataset.positives = read_triples_file(path, order, dataset);
  if (dataset.positives.empty()) {
    throw DomainError("triple file " + path.string() + " contains no triples");
  }
  return dataset;
}

std::vector<Observation> sample_negatives(std::span<const Triple> positives,
                                          double ratio,
                                          const NetworkShape& shape,
                                          std::uint64_t seed) {
  if (!(ratio >= 0.0)) throw DomainError("negative ratio must be >= 0");
  std::unordered_set<std::uint64_t> taken;
  taken.reserve(positives.size() * 2);
  for (const Triple& t : positives) {
    if (!shape.contains(t)) throw ShapeError("positive triple outside shape");
    taken.insert(shape.edge_index(t));
  }
  const auto count = static_cast<std::uint64_t>(
      std::ceil(ratio * static_cast<double>(positives.size())));
  const std::uint64_t edges = shape.n_edges();
  const std::uint64_t available = edges - taken.size();
  if (count > available) {
    throw DomainError("requested " + std::to_string(count) +
                      " negatives but only " + std::to_string(available) +
                      " invalid triples exist");
  }
  std::vector<Observation> out;
  out.reserve(count);
  Engine engine(derive_seed(seed, {0x4e6}));
  if (available <= (std::uint64_t{1} << 22) || count * 4 >= available) {
    std::vector<std::uint64_t> free;
    free.reserve(available);
    for (std::uint64_t idx = 0; idx < edges; ++idx) {
      if (!taken.count(idx)) free.push_back(idx);
    }
    for (std::uint64_t pos : sample_distinct(available, count, engine)) {
      out.push_back({shape.triple_at(free[pos]), 0});
    }
    return out;
  }
  std::uniform_int_distribution<std::uint64_t> pick(0, edges - 1);
  while (out.size() < count) {
    const std::uint64_t idx = pick(engine);
    if (taken.insert(idx).second) out.push_back({shape.triple_at(idx), 0});
  }
  return out;
}

namespace {

std::string format_g(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::vector<std::string_view> split_spaces(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    if (i >= s.size()) break;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

bool parse_double(std::string_view s, double& out) {
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

template <typename Int>
bool parse_int(std::string_view s, Int& out) {
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

}  // namespace

void write_checkpoint(std::ostream& out, const ModelParams& params,
                      const ScoreModel& model) {
  check_layout(model, params);
  out << "MRNCKPT 1\n";
  out << to_string(model.kind) << ' ' << model.latent_dim << ' '
      << params.n_entities() << ' ' << params.n_relations() << ' '
      << format_g(params.radius(), 17) << '\n';
  auto row = [&](std::span<const double> r) {
    for (std::size_t l = 0; l < r.size(); ++l) {
      if (l) out << ' ';
      out << format_g(r[l], 17);
    }
    out << '\n';
  };
  for (std::size_t i = 0; i < params.n_entities(); ++i) row(params.entity(i));
  for (std::size_t k = 0; k < params.n_relations(); ++k) {
    row(params.relation(k));
  }
}

void save_checkpoint(const ModelParams& params, const ScoreModel& model,
                     const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write checkpoint " + path.string());
  write_checkpoint(out, params, model);
  if (!out) throw DomainError("failed writing checkpoint " + path.string());
}

Checkpoint read_checkpoint(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };

  if (!next()) throw FormatError("empty checkpoint", 1);
  const auto magic = split_spaces(line);
  if (magic.size() != 2 || magic[0] != "MRNCKPT") {
    throw FormatError("missing MRNCKPT magic", line_no);
  }
  if (magic[1] != "1") {
    throw FormatError("unsupported checkpoint version " + std::string(magic[1]),
                      line_no);
  }

  if (!next()) throw FormatError("missing header line", 2);
  const auto head = split_spaces(line);
  if (head.size() != 5) {
    throw FormatError("header needs '<kind> <d> <N> <K> <U>'", line_no);
  }
  Checkpoint ck;
  try {
    ck.model.kind = parse_score_kind(head[0]);
  } catch (const DomainError& e) {
    throw FormatError(e.what(), line_no);
  }
  std::size_t n = 0, k = 0;
  double radius = 0.0;
  if (!parse_int(head[1], ck.model.latent_dim) || ck.model.latent_dim == 0 ||
      !parse_int(head[2], n) || !parse_int(head[3], k) ||
      !parse_double(head[4], radius) || !std::isfinite(radius) ||
      !(radius > 0.0)) {
    throw FormatError("malformed header values", line_no);
  }
  ck.params = ModelParams::zeros(ck.model, n, k, radius);

  auto read_row = [&](std::span<double> row, const std::string& what) {
    if (!next()) throw FormatError("truncated checkpoint: missing " + what, 0);
    const auto tokens = split_spaces(line);
    if (tokens.size() != row.size()) {
      throw FormatError(what + " has " + std::to_string(tokens.size()) +
                            " values, expected " + std::to_string(row.size()),
                        line_no);
    }
    for (std::size_t l = 0; l < row.size(); ++l) {
      if (!parse_double(tokens[l], row[l])) {
        throw FormatError(what + ": cannot parse value " + std::to_string(l),
                          line_no);
      }
      if (!std::isfinite(row[l])) {
        throw FormatError(what + ": non-finite value at column " +
                              std::to_string(l),
                          line_no);
      }
    }
  };
  for (std::size_t i = 0; i < n; ++i) {
    read_row(ck.params.entity(i), "entity row " + std::to_string(i));
  }
  for (std::size_t r = 0; r < k; ++r) {
    read_row(ck.params.relation(r), "relation row " + std::to_string(r));
  }
  while (next()) {
    if (!split_spaces(line).empty()) {
      throw FormatError("unexpected data after the last relation row", line_no);
    }
  }
  return ck;
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot open checkpoint " + path.string());
  try {
    return read_checkpoint(in);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what(), 0);
  }
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_commas(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t c = s.find(',', start);
    const auto piece = trim(s.substr(start, c - start));
    if (!piece.empty()) out.push_back(piece);
    if (c == std::string_view::npos) break;
    start = c + 1;
  }
  return out;
}

}  // namespace

Config Config::parse(std::istream& in) {
  Config cfg;
  std::string section;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("line " + std::to_string(line_no) +
                          ": unterminated section header");
      }
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) {
      throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    }
    cfg.set(section, key, trim(line.substr(eq + 1)));
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse(in);
}

void Config::set(std::string_view section, std::string_view key,
                 std::string_view value) {
  sections_[std::string(section)][std::string(key)] = std::string(value);
}

std::optional<std::string> Config::find(std::string_view section,
                                        std::string_view key) const {
  for (std::string_view s : {section, std::string_view{}}) {
    auto sec = sections_.find(s);
    if (sec == sections_.end()) continue;
    auto it = sec->second.find(key);
    if (it != sec->second.end()) return it->second;
  }
  return std::nullopt;
}

bool Config::has(std::string_view section, std::string_view key) const {
  return find(section, key).has_value();
}

std::string Config::get(std::string_view section, std::string_view key,
                        std::string_view fallback) const {
  auto v = find(section, key);
  return v ? *v : std::string(fallback);
}

std::string Config::require(std::string_view section,
                            std::string_view key) const {
  auto v = find(section, key);
  if (!v) {
    throw ConfigError("missing required key '" + std::string(key) +
                      "' in [" + std::string(section) + "]");
  }
  return *v;
}

double Config::get_double(std::string_view section, std::string_view key,
                          double fallback) const {
  auto v = find(section, key);
  if (!v) return fallback;
  double out = 0.0;
  if (!parse_double(*v, out)) {
    throw ConfigError("key '" + std::string(key) + "': not a number: " + *v);
  }
  return out;
}

std::int64_t Config::get_int(std::string_view section, std::string_view key,
                             std::int64_t fallback) const {
  auto v = find(section, key);
  if (!v) return fallback;
  std::int64_t out = 0;
  if (!parse_int(*v, out)) {
    throw ConfigError("key '" + std::string(key) + "': not an integer: " + *v);
  }
  return out;
}

bool Config::get_bool(std::string_view section, std::string_view key,
                      bool fallback) const {
  auto v = find(section, key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
  if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
  throw ConfigError("key '" + std::string(key) + "': not a boolean: " + *v);
}

std::vector<double> Config::get_doubles(std::string_view section,
                                        std::string_view key,
                                        std::vector<double> fallback) const {
  auto v = find(section, key);
  if (!v) return fallback;
  std::vector<double> out;
  for (auto piece : split_commas(*v)) {
    double d = 0.0;
    if (!parse_double(piece, d)) {
      throw ConfigError("key '" + std::string(key) +
                        "': not a number list: " + *v);
    }
    out.push_back(d);
  }
  return out;
}

std::vector<std::int64_t> Config::get_ints(
    std::string_view section, std::string_view key,
    std::vector<std::int64_t> fallback) const {
  auto v = find(section, key);
  if (!v) return fallback;
  std::vector<std::int64_t> out;
  for (auto piece : split_commas(*v)) {
    std::int64_t d = 0;
    if (!parse_int(piece, d)) {
      throw ConfigError("key '" + std::string(key) +
                        "': not an integer list: " + *v);
    }
    out.push_back(d);
  }
  return out;
}

namespace {

std::size_t non_negative(std::int64_t v, std::string_view key) {
  if (v < 0) throw ConfigError("key '" + std::string(key) + "' must be >= 0");
  return static_cast<std::size_t>(v);
}

}  // namespace

TrainConfig train_config_from(const Config& config, std::string_view section) {
  TrainConfig t;
  t.learning_rate =
      config.get_double(section, "learning_rate", t.learning_rate);
  t.adagrad_eps = config.get_double(section, "adagrad_eps", t.adagrad_eps);
  t.epochs = non_negative(
      config.get_int(section, "epochs", static_cast<std::int64_t>(t.epochs)),
      "epochs");
  t.batch_size = non_negative(
      config.get_int(section, "batch_size",
                     static_cast<std::int64_t>(t.batch_size)),
      "batch_size");
  t.rho1 = config.get_double(section, "rho1", t.rho1);
  t.rho2 = config.get_double(section, "rho2", t.rho2);
  if (config.has(section, "sparsity_cap")) {
    t.sparsity_cap =
        non_negative(config.get_int(section, "sparsity_cap", 0), "sparsity_cap");
  }
  t.radius = config.get_double(section, "radius", t.radius);
  t.seed = static_cast<std::uint64_t>(
      config.get_int(section, "seed", static_cast<std::int64_t>(t.seed)));
  t.init_scale = config.get_double(section, "init_scale", t.init_scale);
  return t;
}

std::string format_metric(double value) { return format_g(value, 9); }

void write_grid_csv(std::ostream& out, std::span<const GridRow> rows) {
  out << kGridCsvHeader << '\n';
  for (const GridRow& r : rows) {
    out << r.n_entities << ',' << format_metric(r.obs_rate) << ','
        << r.replicate << ',' << format_metric(r.avg_kl) << ','
        << format_metric(r.mse_phi) << ',' << format_metric(r.link_err) << ','
        << format_metric(r.seconds) << '\n';
  }
}

void write_eval_csv(std::ostream& out, const RankReport& ranks,
                    const EvalReport* losses) {
  out << "metric,value\n";
  out << "mr_e," << format_metric(ranks.mr_entity) << '\n';
  out << "mrr_e," << format_metric(ranks.mrr_entity) << '\n';
  for (const auto& [q, v] : ranks.hits_entity) {
    out << "hits_e@" << q << ',' << format_metric(v) << '\n';
  }
  out << "mr_r," << format_metric(ranks.mr_relation) << '\n';
  out << "mrr_r," << format_metric(ranks.mrr_relation) << '\n';
  for (const auto& [q, v] : ranks.hits_relation) {
    out << "hits_r@" << q << ',' << format_metric(v) << '\n';
  }
  if (losses) {
    out << "avg_kl," << format_metric(losses->avg_kl) << '\n';
    out << "mse_phi," << format_metric(losses->mse_phi) << '\n';
    out << "link_err," << format_metric(losses->link_err) << '\n';
    out << "n_evaluated," << losses->n_evaluated << '\n';
  }
}

}  // namespace mrnet
