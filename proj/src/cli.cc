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

#include "mrnet/cli.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "CLI11.hpp"
#include "mrnet/bounds.h"
#include "mrnet/errors.h"
#include "mrnet/evaluation.h"
#include "mrnet/simulation.h"

namespace mrnet {

namespace {

std::string_view section_of(Mode mode) {
  switch (mode) {
    case Mode::kSimulate:
      return "simulate";
    case Mode::kTrain:
      return "train";
    case Mode::kEvaluate:
      return "evaluate";
    case Mode::kBounds:
      return "bounds";
  }
  return "";
}

ScoreModel model_from(const Config& cfg, std::string_view section,
                      ScoreModel fallback) {
  ScoreModel model = fallback;
  try {
    model.kind = parse_score_kind(
        cfg.get(section, "model", to_string(fallback.kind)));
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  const auto dim = cfg.get_int(section, "dim",
                               static_cast<std::int64_t>(fallback.latent_dim));
  if (dim < 1) throw ConfigError("dim must be >= 1");
  model.latent_dim = static_cast<std::size_t>(dim);
  return model;
}

void require_file(const std::string& path, std::string_view key) {
  if (!path.empty() && !std::filesystem::exists(path)) {
    throw ConfigError("file for '" + std::string(key) + "' not found: " + path);
  }
}

GenSpec gen_spec_from(const Config& cfg, std::string_view section,
                      const ScoreModel& model) {
  GenSpec gen;
  gen.model = model;
  gen.shape.n_relations = static_cast<std::size_t>(
      cfg.get_int(section, "relations", 5));
  gen.entity_sd = cfg.get_double(section, "entity_sd", gen.entity_sd);
  gen.shift_sd = cfg.get_double(section, "shift_sd", gen.shift_sd);
  gen.weight_sd = cfg.get_double(section, "weight_sd", gen.weight_sd);
  gen.truncation = cfg.get_double(section, "truncation", gen.truncation);
  gen.seed = static_cast<std::uint64_t>(cfg.get_int(section, "seed", 1));
  return gen;
}

std::vector<std::size_t> sizes(const std::vector<std::int64_t>& v,
                               std::string_view key) {
  std::vector<std::size_t> out;
  for (auto x : v) {
    if (x < 1) throw ConfigError("'" + std::string(key) + "' entries must be >= 1");
    out.push_back(static_cast<std::size_t>(x));
  }
  return out;
}

// Writes to `path`, or to `fallback` when the path is empty or "-".
template <typename Fn>
void emit(const std::string& path, std::ostream& fallback, Fn&& write) {
  if (path.empty() || path == "-") {
    write(fallback);
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DomainError("cannot write " + path);
  write(f);
}

}  // namespace

RunConfig RunConfig::from(const Config& cfg, Mode mode) {
  const std::string_view sec = section_of(mode);
  RunConfig run;
  run.mode = mode;
  run.model = model_from(cfg, sec, run.model);
  try {
    run.train = train_config_from(cfg, sec);
    run.columns = ColumnOrder::parse(cfg.get(sec, "columns", "hrt"));
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  run.train_path = cfg.get(sec, "train", "");
  run.valid_path = cfg.get(sec, "valid", "");
  run.test_path = cfg.get(sec, "test", "");
  run.negatives_path = cfg.get(sec, "negatives", "");
  run.negative_ratio = cfg.get_double(sec, "negative_ratio", 1.0);
  if (!(run.negative_ratio >= 0.0)) {
    throw ConfigError("negative_ratio must be >= 0");
  }
  run.hits_qs.clear();
  for (auto q : cfg.get_ints(sec, "hits", {1, 3, 10})) {
    if (q < 1) throw ConfigError("hits entries must be >= 1");
    run.hits_qs.push_back(static_cast<int>(q));
  }
  run.output = cfg.get(sec, "output", "");
  run.checkpoint = cfg.get(sec, "checkpoint", "");
  run.truth_checkpoint = cfg.get(sec, "truth_checkpoint", "");
  run.sweep_dims = sizes(cfg.get_ints(sec, "dims", {}), "dims");
  run.sweep_rho2 = cfg.get_doubles(sec, "rho2s", {});

  if (run.train_path.empty()) throw ConfigError("missing required key 'train'");
  require_file(run.train_path, "train");
  require_file(run.valid_path, "valid");
  require_file(run.test_path, "test");
  require_file(run.negatives_path, "negatives");
  require_file(run.truth_checkpoint, "truth_checkpoint");
  if (mode == Mode::kEvaluate && run.test_path.empty()) {
    throw ConfigError("evaluate needs a 'test' split");
  }
  return run;
}

SplitData load_splits(const RunConfig& run) {
  SplitData data;
  data.train = read_triples_file(run.train_path, run.columns, data.dataset);
  if (data.train.empty()) {
    throw DomainError("train split " + run.train_path + " contains no triples");
  }
  if (!run.valid_path.empty()) {
    data.valid = read_triples_file(run.valid_path, run.columns, data.dataset);
  }
  if (!run.test_path.empty()) {
    data.test = read_triples_file(run.test_path, run.columns, data.dataset);
  }
  if (!run.negatives_path.empty()) {
    data.dataset.negatives =
        read_triples_file(run.negatives_path, run.columns, data.dataset);
  }
  data.dataset.positives = data.train;
  for (const auto* split : {&data.train, &data.valid, &data.test}) {
    for (const Triple& t : *split) data.all_valid.insert(t);
  }
  return data;
}

ObservationSet training_observations(const SplitData& data,
                                     const RunConfig& run) {
  NetworkShape shape = data.dataset.shape();
  std::vector<Observation> items;
  KnownTriples taken;
  for (const Triple& t : data.train) {
    items.push_back({t, 1});
    taken.insert(t);
  }
  std::vector<Triple> blocked = data.train;
  for (const Triple& t : data.dataset.negatives) {
    if (taken.contains(t)) continue;
    items.push_back({t, 0});
    taken.insert(t);
    blocked.push_back(t);
  }
  const double wanted =
      run.negative_ratio * static_cast<double>(data.train.size());
  if (wanted > 0.0) {
    // The ratio is relative to the train positives, not to `blocked`.
    const double ratio = wanted / static_cast<double>(blocked.size());
    for (const Observation& o :
         sample_negatives(blocked, ratio, shape, run.train.seed)) {
      items.push_back(o);
    }
  }
  shape.obs_rate =
      static_cast<double>(items.size()) / static_cast<double>(shape.n_edges());
  return ObservationSet(shape, std::move(items));
}

namespace {

struct CommonFlags {
  std::string config;
  std::string checkpoint;
  std::optional<std::int64_t> seed;
  std::string columns;
  std::optional<std::int64_t> threads;
};

Config load_config(const CommonFlags& flags, Mode mode) {
  Config cfg = Config::load(flags.config);
  const std::string sec(section_of(mode));
  if (flags.seed) cfg.set(sec, "seed", std::to_string(*flags.seed));
  if (!flags.columns.empty()) cfg.set(sec, "columns", flags.columns);
  if (flags.threads) cfg.set(sec, "threads", std::to_string(*flags.threads));
  return cfg;
}

int cmd_simulate(const CommonFlags& flags, std::ostream& out,
                 std::ostream& err) {
  const Config cfg = load_config(flags, Mode::kSimulate);
  const std::string sec = "simulate";
  ExperimentGrid grid;
  const ScoreModel model =
      model_from(cfg, sec, {ScoreKind::kCombinedQuadratic, 5});
  grid.gen = gen_spec_from(cfg, sec, model);
  grid.entity_counts =
      sizes(cfg.get_ints(sec, "entities", {100, 200}), "entities");
  grid.obs_rates = cfg.get_doubles(sec, "obs_rates", {0.02});
  grid.replicates = static_cast<std::size_t>(cfg.get_int(sec, "replicates", 1));
  grid.train = train_config_from(cfg, sec);
  grid.radius_from_generator = cfg.get_bool(sec, "radius_from_generator", true);
  if (cfg.has(sec, "truth_radius")) {
    grid.truth_radius = cfg.get_double(sec, "truth_radius", 1.0);
  }
  grid.eval_cap = static_cast<std::uint64_t>(
      cfg.get_int(sec, "eval_cap", static_cast<std::int64_t>(grid.eval_cap)));
  grid.threads = static_cast<std::size_t>(cfg.get_int(sec, "threads", 1));
  grid.timing = cfg.get_bool(sec, "timing", true);
  try {
    grid.validate();
    grid.gen.shape.obs_rate = grid.obs_rates.front();
    grid.gen.shape.n_entities = grid.entity_counts.front();
    grid.gen.validate();
    validate(grid.train, std::numeric_limits<std::size_t>::max());
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }

  const auto rows = run_grid(grid);
  for (const GridRow& r : rows) {
    if (r.failed) {
      err << "cell N=" << r.n_entities << " gamma=" << r.obs_rate
          << " replicate " << r.replicate << " failed: " << r.error << '\n';
    } else if (r.subsampled) {
      err << "cell N=" << r.n_entities << " gamma=" << r.obs_rate
          << " replicate " << r.replicate << ": losses estimated on "
          << r.n_evaluated << " sampled edges\n";
    }
  }
  emit(cfg.get(sec, "output", ""), out,
       [&](std::ostream& o) { write_grid_csv(o, rows); });
  return kExitOk;
}

ModelParams fit_kb(const RunConfig& run, const ScoreModel& model,
                   const ObservationSet& obs, double rho2, double* objective) {
  TrainConfig config = run.train;
  config.rho2 = rho2;
  TrainResult fit = train(model, obs, config);
  if (objective) {
    *objective = fit.objective_trace.empty() ? fit.initial_objective
                                             : fit.objective_trace.back();
  }
  return std::move(fit.params);
}

int cmd_train(const CommonFlags& flags, std::ostream& out, std::ostream& err) {
  const Config cfg = load_config(flags, Mode::kTrain);
  const RunConfig run = RunConfig::from(cfg, Mode::kTrain);
  const std::string checkpoint =
      flags.checkpoint.empty() ? run.checkpoint : flags.checkpoint;
  if (checkpoint.empty()) throw ConfigError("train needs a 'checkpoint' path");

  const SplitData data = load_splits(run);
  if (data.dataset.duplicate_count) {
    err << "dropped " << data.dataset.duplicate_count << " duplicate triples\n";
  }
  const ObservationSet obs = training_observations(data, run);
  try {
    validate(run.train, std::numeric_limits<std::size_t>::max());
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }

  ScoreModel model = run.model;
  double rho2 = run.train.rho2;
  const bool sweep = !data.valid.empty() &&
                     (!run.sweep_dims.empty() || !run.sweep_rho2.empty());
  if (sweep) {
    const auto dims = run.sweep_dims.empty()
                          ? std::vector<std::size_t>{model.latent_dim}
                          : run.sweep_dims;
    const auto rhos =
        run.sweep_rho2.empty() ? std::vector<double>{rho2} : run.sweep_rho2;
    double best = -1.0;
    for (std::size_t d : dims) {
      for (double r : rhos) {
        const ScoreModel candidate{model.kind, d};
        const ModelParams fit = fit_kb(run, candidate, obs, r, nullptr);
        const RankReport rep = rank_report(candidate, fit, data.valid,
                                           data.all_valid, run.hits_qs);
        err << "valid d=" << d << " rho2=" << format_metric(r)
            << " mrr_e=" << format_metric(rep.mrr_entity) << '\n';
        if (rep.mrr_entity > best) {
          best = rep.mrr_entity;
          model = candidate;
          rho2 = r;
        }
      }
    }
    err << "selected d=" << model.latent_dim << " rho2=" << format_metric(rho2)
        << '\n';
  }
  double objective = 0.0;
  const ModelParams fit = fit_kb(run, model, obs, rho2, &objective);
  save_checkpoint(fit, model, checkpoint);
  out << "final_objective " << format_metric(objective) << '\n';
  return kExitOk;
}

int cmd_evaluate(const CommonFlags& flags, std::ostream& out,
                 std::ostream& err) {
  const Config cfg = load_config(flags, Mode::kEvaluate);
  const RunConfig run = RunConfig::from(cfg, Mode::kEvaluate);
  const std::string path =
      flags.checkpoint.empty() ? run.checkpoint : flags.checkpoint;
  if (path.empty()) throw ConfigError("evaluate needs --checkpoint");
  require_file(path, "checkpoint");

  const SplitData data = load_splits(run);
  const Checkpoint ck = load_checkpoint(path);
  const NetworkShape shape = data.dataset.shape();
  if (ck.params.n_entities() != shape.n_entities ||
      ck.params.n_relations() != shape.n_relations) {
    throw ShapeError("checkpoint shape (N=" +
                     std::to_string(ck.params.n_entities()) +
                     ", K=" + std::to_string(ck.params.n_relations()) +
                     ") does not match the dataset (N=" +
                     std::to_string(shape.n_entities) +
                     ", K=" + std::to_string(shape.n_relations) + ")");
  }
  if (data.test.empty()) throw DomainError("test split contains no triples");
  const RankReport ranks =
      rank_report(ck.model, ck.params, data.test, data.all_valid, run.hits_qs);

  std::optional<EvalReport> losses;
  if (!run.truth_checkpoint.empty()) {
    const Checkpoint truth = load_checkpoint(run.truth_checkpoint);
    if (!(truth.model == ck.model)) {
      throw ShapeError("truth checkpoint uses a different score model");
    }
    losses = evaluate_losses(ck.model, ck.params, truth.params);
  }
  (void)err;
  emit(run.output, out, [&](std::ostream& o) {
    write_eval_csv(o, ranks, losses ? &*losses : nullptr);
  });
  return kExitOk;
}

int cmd_bounds(const CommonFlags& flags, std::ostream& out, std::ostream& err) {
  const Config cfg = load_config(flags, Mode::kBounds);
  const std::string sec = "bounds";
  const ScoreModel model =
      model_from(cfg, sec, {ScoreKind::kCombinedQuadratic, 2});
  const auto n_entities =
      static_cast<std::size_t>(cfg.get_int(sec, "entities", 6));
  const auto n_relations =
      static_cast<std::size_t>(cfg.get_int(sec, "relations", 2));
  const double obs_rate = cfg.get_double(sec, "obs_rate", 1.0);
  const double radius = cfg.get_double(sec, "radius", 1.0);
  const std::vector<double> ts = cfg.get_doubles(sec, "t", {0.5, 1.0});
  const auto replicates =
      static_cast<std::size_t>(cfg.get_int(sec, "replicates", 0));

  BoundInputs in;
  try {
    const NetworkShape shape{n_entities, n_relations, obs_rate};
    shape.validate();
    in.n = shape.expected_observations();
    in.m = static_cast<double>(model.dimension(n_entities, n_relations));
    in.sup_score = score_sup_bound(model, radius);
    in.lipschitz = lipschitz_bound(model, radius);
    in.radius = radius;
    in.obs_rate = obs_rate;
    in.validate();
    for (double t : ts) {
      if (!(t > 0.0)) throw DomainError("t values must be > 0");
    }
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }

  std::vector<double> losses;
  if (replicates > 0) {
    ExperimentGrid grid;
    grid.gen = gen_spec_from(cfg, sec, model);
    grid.gen.shape.n_relations = n_relations;
    grid.entity_counts = {n_entities};
    grid.obs_rates = {obs_rate};
    grid.replicates = replicates;
    grid.train = train_config_from(cfg, sec);
    grid.truth_radius = radius;
    grid.timing = false;
    for (const GridRow& r : run_grid(grid)) {
      if (r.failed) {
        err << "replicate " << r.replicate << " failed: " << r.error << '\n';
      } else {
        losses.push_back(r.avg_kl);
      }
    }
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto frequency = [&](double t) {
    if (losses.empty()) return nan;
    std::size_t hits = 0;
    for (double l : losses) hits += l >= t;
    return static_cast<double>(hits) / static_cast<double>(losses.size());
  };
  double mean_loss = nan;
  if (!losses.empty()) {
    mean_loss = 0.0;
    for (double l : losses) mean_loss += l;
    mean_loss /= static_cast<double>(losses.size());
  }
  double risk = nan;
  try {
    risk = risk_bound(in).value;
  } catch (const DomainError& e) {
    err << e.what() << '\n';
  }

  emit(cfg.get(sec, "output", ""), out, [&](std::ostream& o) {
    o << "t,tail_bound,empirical_frequency\n";
    for (double t : ts) {
      o << format_metric(t) << ',' << format_metric(tail_bound(in, t).value)
        << ',' << format_metric(frequency(t)) << '\n';
    }
    o << '\n' << "risk_bound,empirical_risk\n";
    o << format_metric(risk) << ',' << format_metric(mean_loss) << '\n';
    if (cfg.has(sec, "kappa")) {
      LowerBoundInputs lo;
      lo.m = in.m;
      lo.n = in.n;
      lo.kappa = cfg.get_double(sec, "kappa", 0.0);
      lo.b = cfg.get_double(sec, "b", 0.5);
      lo.lipschitz = in.lipschitz;
      lo.neighborhood_radius = cfg.get_double(sec, "r", 0.0);
      const MinimaxLower mm = minimax_lower(lo);
      o << '\n' << "minimax_risk_lower,tail_threshold,r_condition_ok\n";
      o << format_metric(mm.risk_lower) << ',' << format_metric(mm.tail_threshold)
        << ',' << (mm.r_condition_ok ? 1 : 0) << '\n';
    }
  });
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Latent-variable models for multi-relational networks", "mrnet"};
  app.require_subcommand(1);
  CommonFlags flags;

  auto add_common = [&](CLI::App* sub, bool with_checkpoint) {
    sub->add_option("--config", flags.config, "configuration file")
        ->required();
    if (with_checkpoint) {
      sub->add_option("--checkpoint", flags.checkpoint, "checkpoint path");
    }
    sub->add_option("--seed", flags.seed, "override the configured seed");
    sub->add_option("--columns", flags.columns, "column order (hrt|htr|...)");
    sub->add_option("--threads", flags.threads, "worker threads");
  };
  CLI::App* simulate = app.add_subcommand("simulate", "run a simulation grid");
  CLI::App* train_cmd = app.add_subcommand("train", "fit a model to triples");
  CLI::App* evaluate = app.add_subcommand("evaluate", "rank a test split");
  CLI::App* bounds = app.add_subcommand("bounds", "tabulate error bounds");
  add_common(simulate, false);
  add_common(train_cmd, true);
  add_common(evaluate, true);
  add_common(bounds, false);

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  if (argv.empty()) argv.push_back("mrnet");
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n\n" << app.help();
    return kExitConfig;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(flags, out, err);
    if (train_cmd->parsed()) return cmd_train(flags, out, err);
    if (evaluate->parsed()) return cmd_evaluate(flags, out, err);
    if (bounds->parsed()) return cmd_bounds(flags, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  }
  err << app.help();
  return kExitConfig;
}

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace mrnet
