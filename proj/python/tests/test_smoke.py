# Copyright 2026 The mrnet Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import math

import numpy as np
import pytest

import mrnet


def test_scores_and_probabilities():
    model = mrnet.ScoreModel("distance", 2)
    x = mrnet.ModelParams.zeros(model, 2, 1, 10.0)
    x.entities = np.array([[1.0, 0.0], [0.0, 0.0]])
    x.relations = np.array([[-1.0, 0.0, 3.0]])
    edge = mrnet.Triple(0, 1, 0)
    assert mrnet.score(model, x, edge) == 3.0
    assert mrnet.edge_probability(model, x, edge) == pytest.approx(0.9525741268224334)
    head, tail, rel = mrnet.score_gradient(model, x, edge)
    assert rel[2] == 1.0
    with pytest.raises(mrnet.ShapeError):
        x.entities = np.zeros((3, 2))


def test_simulate_train_evaluate():
    model = mrnet.ScoreModel(mrnet.ScoreKind.COMBINED, 2)
    shape = mrnet.NetworkShape(8, 2, 1.0)
    truth = mrnet.generate_truth(mrnet.GenSpec(model, shape, seed=3))
    labels = mrnet.NetworkSample(model, truth, 4)
    obs = mrnet.sample_observations(shape, labels, 5)
    assert len(obs) == 128
    config = mrnet.TrainConfig()
    config.radius = truth.radius
    config.epochs = 30
    fit = mrnet.train(model, obs, config)
    assert len(fit.objective_trace) == 30
    assert fit.objective_trace[-1] >= fit.initial_objective
    report = mrnet.evaluate_losses(model, fit.params, truth)
    assert 0.0 <= report.link_err <= 1.0
    assert report.n_evaluated == 128

    positives = [e for e, y in zip(obs.edges, obs.labels) if y == 1][:5]
    ranks = mrnet.rank_report(model, fit.params, positives)
    assert 1.0 <= ranks.mr_entity
    assert 0.0 < ranks.mrr_entity <= 1.0
    assert set(ranks.hits_entity) == {1, 3, 10}


def test_bounds():
    assert mrnet.bennett_h(1.0) == pytest.approx(2 * math.log(2) - 1)
    risk = mrnet.risk_bound(mrnet.BoundInputs(1e6, 10, 10, 5, 1))
    assert risk.c3 == 360.0
    assert risk.value == pytest.approx(0.041446531673892822312, rel=1e-12)
    tail = mrnet.tail_bound(mrnet.BoundInputs(1e4, 50, 10, 5, 1), 1.0, s=100, beta=1)
    assert tail.vacuous
    low = mrnet.minimax_lower(160, 1e4, 0.1, 0.5, 1.0, 0.01)
    assert low.risk_lower == pytest.approx(1.0416666666666667e-8)
    with pytest.raises(mrnet.DomainError):
        mrnet.risk_bound(mrnet.BoundInputs(500, 10, 10, 5, 1))
    assert mrnet.check_kl_quadratic_upper(0.1, 0.9)
    assert mrnet.bernoulli_kl(0.5, 0.5) == 0.0


def test_checkpoint_and_cli(tmp_path):
    model = mrnet.ScoreModel("bilinear", 3)
    x = mrnet.ModelParams.zeros(model, 4, 2, 5.0)
    x.entities = np.random.default_rng(0).normal(size=(4, 3))
    path = tmp_path / "x.ckpt"
    mrnet.save_checkpoint(x, model, path)
    loaded_model, loaded = mrnet.load_checkpoint(path)
    assert loaded_model == model
    assert loaded == x
    np.testing.assert_array_equal(loaded.entities, x.entities)

    code, out, err = mrnet.run_cli(["train", "--bogus"])
    assert code == 2
    assert "Usage" in err
    cfg = tmp_path / "sim.ini"
    cfg.write_text(
        "[simulate]\nmodel = bilinear\ndim = 2\nrelations = 1\nentities = 5\n"
        "obs_rates = 1\nepochs = 5\ntiming = false\n"
    )
    code, out, err = mrnet.run_cli(["simulate", "--config", str(cfg)])
    assert code == 0
    assert out.splitlines()[0] == "n_entities,obs_rate,replicate,avg_kl,mse_phi,link_err,seconds"
