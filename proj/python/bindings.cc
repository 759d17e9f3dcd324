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

#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "mrnet/bounds.h"
#include "mrnet/cli.h"
#include "mrnet/errors.h"
#include "mrnet/estimation.h"
#include "mrnet/evaluation.h"
#include "mrnet/io.h"
#include "mrnet/model.h"
#include "mrnet/simulation.h"

namespace py = pybind11;
using namespace mrnet;

namespace {

py::array_t<double> rows_view(const ModelParams& x, bool entities) {
  const std::size_t rows = entities ? x.n_entities() : x.n_relations();
  const std::size_t cols = entities ? x.entity_dim() : x.relation_dim();
  py::array_t<double> out({rows, cols});
  auto m = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < rows; ++i) {
    const auto row = entities ? x.entity(i) : x.relation(i);
    for (std::size_t l = 0; l < cols; ++l) m(i, l) = row[l];
  }
  return out;
}

void set_rows(ModelParams& x, bool entities,
              const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  const std::size_t rows = entities ? x.n_entities() : x.n_relations();
  const std::size_t cols = entities ? x.entity_dim() : x.relation_dim();
  if (a.ndim() != 2 || static_cast<std::size_t>(a.shape(0)) != rows ||
      static_cast<std::size_t>(a.shape(1)) != cols) {
    throw ShapeError("expected an array of shape (" + std::to_string(rows) +
                     ", " + std::to_string(cols) + ")");
  }
  auto v = a.unchecked<2>();
  for (std::size_t i = 0; i < rows; ++i) {
    auto row = entities ? x.entity(i) : x.relation(i);
    for (std::size_t l = 0; l < cols; ++l) row[l] = v(i, l);
  }
}

std::vector<Observation> to_observations(const std::vector<Triple>& edges,
                                         const std::vector<int>& labels) {
  if (edges.size() != labels.size()) {
    throw ShapeError("edges and labels differ in length");
  }
  std::vector<Observation> out;
  out.reserve(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw DomainError("labels must be 0 or 1");
    out.push_back({edges[i], static_cast<std::uint8_t>(labels[i])});
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_mrnet, m) {
  m.doc() = "Latent-variable models for multi-relational networks";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ShapeError>(m, "ShapeError", error.ptr());
  py::register_exception<DomainError>(m, "DomainError", error.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", error.ptr());
  auto parse_error = py::register_exception<ParseError>(m, "ParseError", error.ptr());
  py::register_exception<FormatError>(m, "FormatError", parse_error.ptr());

  py::enum_<ScoreKind>(m, "ScoreKind")
      .value("DISTANCE", ScoreKind::kDistance)
      .value("BILINEAR", ScoreKind::kBilinear)
      .value("COMBINED", ScoreKind::kCombinedQuadratic);

  py::class_<Triple>(m, "Triple")
      .def(py::init<std::uint32_t, std::uint32_t, std::uint32_t>(),
           py::arg("head"), py::arg("tail"), py::arg("rel"))
      .def_readwrite("head", &Triple::head)
      .def_readwrite("tail", &Triple::tail)
      .def_readwrite("rel", &Triple::rel)
      .def(py::self == py::self)
      .def("__repr__", [](const Triple& t) {
        return "Triple(" + std::to_string(t.head) + ", " +
               std::to_string(t.tail) + ", " + std::to_string(t.rel) + ")";
      });

  py::class_<NetworkShape>(m, "NetworkShape")
      .def(py::init([](std::size_t n, std::size_t k, double gamma) {
             NetworkShape s{n, k, gamma};
             s.validate();
             return s;
           }),
           py::arg("n_entities"), py::arg("n_relations"), py::arg("obs_rate") = 1.0)
      .def_readwrite("n_entities", &NetworkShape::n_entities)
      .def_readwrite("n_relations", &NetworkShape::n_relations)
      .def_readwrite("obs_rate", &NetworkShape::obs_rate)
      .def_property_readonly("n_edges", &NetworkShape::n_edges)
      .def_property_readonly("expected_observations",
                             &NetworkShape::expected_observations);

  py::class_<ScoreModel>(m, "ScoreModel")
      .def(py::init([](const py::object& kind, std::size_t d) {
             ScoreKind k = py::isinstance<py::str>(kind)
                               ? parse_score_kind(kind.cast<std::string>())
                               : kind.cast<ScoreKind>();
             return ScoreModel{k, d};
           }),
           py::arg("kind"), py::arg("latent_dim"))
      .def_readwrite("kind", &ScoreModel::kind)
      .def_readwrite("latent_dim", &ScoreModel::latent_dim)
      .def_property_readonly("entity_dim", &ScoreModel::entity_dim)
      .def_property_readonly("relation_dim", &ScoreModel::relation_dim)
      .def("dimension", &ScoreModel::dimension)
      .def(py::self == py::self);

  py::class_<ModelParams>(m, "ModelParams")
      .def_static("zeros", &ModelParams::zeros, py::arg("model"),
                  py::arg("n_entities"), py::arg("n_relations"), py::arg("radius"))
      .def_property_readonly("n_entities", &ModelParams::n_entities)
      .def_property_readonly("n_relations", &ModelParams::n_relations)
      .def_property_readonly("dimension", &ModelParams::dimension)
      .def_property("radius", &ModelParams::radius, &ModelParams::set_radius)
      .def_property(
          "entities", [](const ModelParams& x) { return rows_view(x, true); },
          [](ModelParams& x, const py::array_t<double, py::array::c_style |
                                                          py::array::forcecast>& a) {
            set_rows(x, true, a);
          })
      .def_property(
          "relations", [](const ModelParams& x) { return rows_view(x, false); },
          [](ModelParams& x, const py::array_t<double, py::array::c_style |
                                                          py::array::forcecast>& a) {
            set_rows(x, false, a);
          })
      .def("validate", &ModelParams::validate)
      .def(py::self == py::self);

  m.def("score", &score, py::arg("model"), py::arg("params"), py::arg("edge"));
  m.def("edge_probability", &edge_probability, py::arg("model"),
        py::arg("params"), py::arg("edge"));
  m.def(
      "score_gradient",
      [](const ScoreModel& model, const ModelParams& x, const Triple& e) {
        const ScoreGradient g = score_gradient(model, x, e);
        return py::make_tuple(g.head, g.tail, g.rel);
      },
      py::arg("model"), py::arg("params"), py::arg("edge"));
  m.def("score_sup_bound", &score_sup_bound, py::arg("model"), py::arg("radius"));
  m.def("lipschitz_bound", &lipschitz_bound, py::arg("model"), py::arg("radius"));

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("adagrad_eps", &TrainConfig::adagrad_eps)
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("batch_size", &TrainConfig::batch_size)
      .def_readwrite("rho1", &TrainConfig::rho1)
      .def_readwrite("rho2", &TrainConfig::rho2)
      .def_readwrite("sparsity_cap", &TrainConfig::sparsity_cap)
      .def_readwrite("radius", &TrainConfig::radius)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("init_scale", &TrainConfig::init_scale);

  py::class_<ObservationSet>(m, "ObservationSet")
      .def(py::init([](const NetworkShape& shape, const std::vector<Triple>& edges,
                       const std::vector<int>& labels) {
             return ObservationSet(shape, to_observations(edges, labels));
           }),
           py::arg("shape"), py::arg("edges"), py::arg("labels"))
      .def("__len__", &ObservationSet::size)
      .def_property_readonly("edges",
                             [](const ObservationSet& s) {
                               std::vector<Triple> out;
                               for (const auto& o : s.items()) out.push_back(o.edge);
                               return out;
                             })
      .def_property_readonly("labels", [](const ObservationSet& s) {
        std::vector<int> out;
        for (const auto& o : s.items()) out.push_back(o.label);
        return out;
      });

  py::class_<TrainResult>(m, "TrainResult")
      .def_readonly("params", &TrainResult::params)
      .def_readonly("initial_objective", &TrainResult::initial_objective)
      .def_readonly("objective_trace", &TrainResult::objective_trace)
      .def_readonly("nonzero_trace", &TrainResult::nonzero_trace);

  m.def("log_likelihood",
        py::overload_cast<const ScoreModel&, const ModelParams&,
                          const ObservationSet&>(&log_likelihood),
        py::arg("model"), py::arg("params"), py::arg("obs"));
  m.def("penalized_objective", &penalized_objective, py::arg("model"),
        py::arg("params"), py::arg("obs"), py::arg("rho1") = 0.0,
        py::arg("rho2") = 0.0);
  m.def("project_ball", &project_ball, py::arg("params"), py::arg("radius"));
  m.def("project_l0", &project_l0, py::arg("params"), py::arg("cap"));
  m.def("count_nonzeros", &count_nonzeros, py::arg("params"));
  m.def("train", &train, py::arg("model"), py::arg("obs"),
        py::arg("config") = TrainConfig{}, py::call_guard<py::gil_scoped_release>());

  py::class_<GenSpec>(m, "GenSpec")
      .def(py::init([](const ScoreModel& model, const NetworkShape& shape,
                       std::uint64_t seed) {
             GenSpec g;
             g.model = model;
             g.shape = shape;
             g.seed = seed;
             return g;
           }),
           py::arg("model"), py::arg("shape"), py::arg("seed") = 1)
      .def_readwrite("model", &GenSpec::model)
      .def_readwrite("shape", &GenSpec::shape)
      .def_readwrite("entity_sd", &GenSpec::entity_sd)
      .def_readwrite("shift_sd", &GenSpec::shift_sd)
      .def_readwrite("weight_sd", &GenSpec::weight_sd)
      .def_readwrite("truncation", &GenSpec::truncation)
      .def_readwrite("seed", &GenSpec::seed);
  m.def("generate_truth", &generate_truth, py::arg("spec"));

  py::class_<NetworkSample>(m, "NetworkSample")
      .def(py::init<ScoreModel, ModelParams, std::uint64_t>(), py::arg("model"),
           py::arg("truth"), py::arg("seed"))
      .def("label", &NetworkSample::label, py::arg("edge"))
      .def("probability", &NetworkSample::probability, py::arg("edge"));
  m.def("sample_observations", &sample_observations, py::arg("shape"),
        py::arg("labels"), py::arg("seed"));

  py::class_<EvalReport>(m, "EvalReport")
      .def_readonly("avg_kl", &EvalReport::avg_kl)
      .def_readonly("mse_phi", &EvalReport::mse_phi)
      .def_readonly("link_err", &EvalReport::link_err)
      .def_readonly("n_evaluated", &EvalReport::n_evaluated);
  m.def("evaluate_losses",
        py::overload_cast<const ScoreModel&, const ModelParams&, const ModelParams&>(
            &evaluate_losses),
        py::arg("model"), py::arg("fitted"), py::arg("truth"));
  m.def("bernoulli_kl", &bernoulli_kl, py::arg("p"), py::arg("q"));

  py::class_<RankReport>(m, "RankReport")
      .def_readonly("mr_entity", &RankReport::mr_entity)
      .def_readonly("mrr_entity", &RankReport::mrr_entity)
      .def_readonly("hits_entity", &RankReport::hits_entity)
      .def_readonly("mr_relation", &RankReport::mr_relation)
      .def_readonly("mrr_relation", &RankReport::mrr_relation)
      .def_readonly("hits_relation", &RankReport::hits_relation)
      .def_property_readonly("ranks", [](const RankReport& r) {
        std::vector<std::tuple<double, double, double>> out;
        for (const auto& t : r.ranks) out.emplace_back(t.head, t.tail, t.relation);
        return out;
      });
  m.def(
      "rank_report",
      [](const ScoreModel& model, const ModelParams& x,
         const std::vector<Triple>& test, const std::vector<Triple>& valid,
         const std::vector<int>& qs) {
        KnownTriples known(valid);
        for (const Triple& t : test) known.insert(t);
        return rank_report(model, x, test, known, qs);
      },
      py::arg("model"), py::arg("params"), py::arg("test"),
      py::arg("valid") = std::vector<Triple>{},
      py::arg("hits") = std::vector<int>{1, 3, 10});

  py::class_<BoundInputs>(m, "BoundInputs")
      .def(py::init([](double n, double m_, double c, double alpha, double u) {
             BoundInputs in;
             in.n = n;
             in.m = m_;
             in.sup_score = c;
             in.lipschitz = alpha;
             in.radius = u;
             in.validate();
             return in;
           }),
           py::arg("n"), py::arg("m"), py::arg("sup_score"), py::arg("lipschitz"),
           py::arg("radius"));
  py::class_<TailBound>(m, "TailBound")
      .def_readonly("value", &TailBound::value)
      .def_readonly("log_value", &TailBound::log_value)
      .def_readonly("vacuous", &TailBound::vacuous);
  py::class_<RiskBound>(m, "RiskBound")
      .def_readonly("value", &RiskBound::value)
      .def_readonly("leading", &RiskBound::leading)
      .def_readonly("c1", &RiskBound::c1)
      .def_readonly("c2", &RiskBound::c2)
      .def_readonly("c3", &RiskBound::c3);
  py::class_<MinimaxLower>(m, "MinimaxLower")
      .def_readonly("c_tilde", &MinimaxLower::c_tilde)
      .def_readonly("risk_lower", &MinimaxLower::risk_lower)
      .def_readonly("tail_threshold", &MinimaxLower::tail_threshold)
      .def_readonly("required_radius_sq", &MinimaxLower::required_radius_sq)
      .def_readonly("r_condition_ok", &MinimaxLower::r_condition_ok)
      .def_readonly("vacuous", &MinimaxLower::vacuous);

  m.def("bennett_h", &bennett_h, py::arg("u"));
  m.def(
      "tail_bound",
      [](const BoundInputs& in, double t, std::optional<double> s,
         std::optional<double> beta) {
        if (!s && !beta) return tail_bound(in, t);
        return tail_bound(in, t, s.value_or(in.n * t / 2), beta.value_or(1 + t));
      },
      py::arg("inputs"), py::arg("t"), py::arg("s") = py::none(),
      py::arg("beta") = py::none());
  m.def("risk_bound", &risk_bound, py::arg("inputs"));
  m.def(
      "minimax_lower",
      [](double m_, double n, double kappa, double b, double alpha, double r) {
        LowerBoundInputs in;
        in.m = m_;
        in.n = n;
        in.kappa = kappa;
        in.b = b;
        in.lipschitz = alpha;
        in.neighborhood_radius = r;
        return minimax_lower(in);
      },
      py::arg("m"), py::arg("n"), py::arg("kappa"), py::arg("b"),
      py::arg("lipschitz"), py::arg("radius") = 0.0);
  m.def("check_variance_inequality", &check_variance_inequality, py::arg("x"),
        py::arg("y"), py::arg("c"));
  m.def("check_kl_quadratic_upper", &check_kl_quadratic_upper, py::arg("p"),
        py::arg("q"));

  m.def(
      "save_checkpoint",
      [](const ModelParams& x, const ScoreModel& model,
         const std::filesystem::path& path) { save_checkpoint(x, model, path); },
      py::arg("params"), py::arg("model"), py::arg("path"));
  m.def(
      "load_checkpoint",
      [](const std::filesystem::path& path) {
        Checkpoint c = load_checkpoint(path);
        return py::make_tuple(c.model, std::move(c.params));
      },
      py::arg("path"));

  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "mrnet");
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = run_cli(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"),
      "Runs the command line with `args` (without the program name); returns "
      "(exit code, stdout, stderr).");
}
