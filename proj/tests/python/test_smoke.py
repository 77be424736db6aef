"""Smoke tests for the python bindings: a few pinned values per subsystem."""

import math

import numpy as np
import pytest

import fleam


def test_gru_zero_weight_fixed_point():
    model = fleam.GruModel.zeros(3, 4, 2)
    h = np.zeros(4)
    x = np.array([0.5, -1.0, 2.0])
    assert np.allclose(fleam.gru_step(model, h, x), 0.0)

    # nonzero state halves under zero weights: gates sit at 0.5
    h = np.array([1.0, -2.0, 0.5, 4.0])
    assert np.allclose(fleam.gru_step(model, h, x), 0.5 * h, rtol=0, atol=1e-15)


def test_forward_backward_roundtrip():
    model = fleam.GruModel.random_init(3, 5, 2, seed=42)
    xs = [np.random.RandomState(0).randn(3) for _ in range(4)]
    probs, h_final = fleam.forward_sequence(model, xs)
    assert len(probs) == 4
    for p in probs:
        assert p.shape == (2,)
        assert abs(p.sum() - 1.0) < 1e-9
    assert h_final.shape == (5,)

    grad, loss = fleam.backward(model, xs, [1, -1, -1, 0])
    assert loss > 0
    assert grad.shape == (model.param_count(),)

    values, layout_id = model.flatten()
    assert layout_id == model.layout_id()
    back = fleam.GruModel.unflatten(values, 3, 5, 2)
    assert back == model


def test_sgd_epoch_learns_direction():
    model = fleam.GruModel.random_init(2, 4, 2, seed=1)
    rs = np.random.RandomState(3)
    inputs, labels = [], []
    for _ in range(64):
        x = rs.randn(2)
        inputs.append([x])
        labels.append([1 if x.sum() > 0 else 0])
    _, loss_before = fleam.backward(model, inputs[0], labels[0])
    for _ in range(20):
        model = fleam.sgd_epoch(model, inputs, labels, learning_rate=0.3, batch_size=16, seed=7)
    _, loss_after = fleam.backward(model, inputs[0], labels[0])
    assert loss_after < loss_before


def test_aggregate_weighted_mean():
    a = np.array([1.0, 2.0, 3.0])
    b = np.array([3.0, 2.0, 1.0])
    out = fleam.aggregate([a, b], [0.5, 0.5])
    assert np.allclose(out, [2.0, 2.0, 2.0])
    # identical inputs are a fixed point
    assert np.allclose(fleam.aggregate([a, a, a], [1, 2, 3]), a)


def test_centrality_star_and_placement():
    edges = [("hub", f"leaf{i}", 1.0) for i in range(4)]
    rep = fleam.centrality(edges)
    assert rep["degree_centralization"] == pytest.approx(1.0)
    assert rep["closeness"]["hub"] == pytest.approx(0.25)
    assert rep["betweenness"]["hub"] == pytest.approx(6.0)  # C(4,2) leaf pairs

    picks, covered = fleam.select_checkpoints(
        edges=[("src", "f1", 1.0), ("f1", "victim", 1.0)],
        roles={"src": "device", "f1": "fog", "victim": "cloud"},
        routes=[["src", "f1", "victim"]],
        budget=1,
    )
    assert picks == ["f1"]
    assert covered == 1


def test_economics_pinned_values():
    # published per-second rates at the two mitigation times
    assert fleam.attack_cost_rate(1000, 180.0, 0.0, 1715.91) == pytest.approx(0.105, abs=1e-3)
    assert fleam.attack_cost_rate(1000, 180.0, 0.0, 483.74) == pytest.approx(0.372, abs=1e-3)
    assert fleam.attack_cost_rate(1000, 270.0, 0.0, 483.74) == pytest.approx(0.558, abs=1e-3)

    value, weak = fleam.offensive_firepower(100.0, 1.0)
    assert value == 100.0 and not weak

    assert fleam.mitigation_time([(1, 1.9), (1, 2.8), (1, 4.4)]) == pytest.approx(9.1)

    profit, viable = fleam.profit(1000.0, 372.0)
    assert profit == pytest.approx(628.0) and viable
    _, viable_at_par = fleam.profit(100.0, 100.0)
    assert not viable_at_par


def test_lv_equilibrium_and_conservation():
    traj = fleam.lv_dynamics(1.0, 0.1, 0.1, 1.0, idle0=10.0, bots0=10.0, horizon=2.0)
    assert np.allclose(traj[:, 1], 10.0, atol=1e-9)
    assert np.allclose(traj[:, 2], 10.0, atol=1e-9)

    traj = fleam.lv_dynamics(1.0, 0.1, 0.1, 1.0, idle0=5.0, bots0=5.0, horizon=5.0)
    v0 = fleam.lv_first_integral(1.0, 0.1, 0.1, 1.0, 5.0, 5.0)
    v = [fleam.lv_first_integral(1.0, 0.1, 0.1, 1.0, i, b) for i, b in traj[:, 1:]]
    assert max(abs(x - v0) for x in v) / abs(v0) < 1e-4


def test_delay_simulation_ratio():
    report = fleam.run_delay_simulation(bots=300, trials=200, mix=(1.0, 0.0, 0.0),
                                        model="victim-centric", jitter=0.0, seed=3)
    assert report["mean_delay_s"] == pytest.approx(300 * 1.9)

    mc, closed = fleam.delay_ratio(bots=300, trials=400, seed=5)
    assert closed == pytest.approx(2.6 / 9.1)
    assert 0.25 < mc < 0.32

    assert fleam.system_accuracy(1.0, 0.0) == 0.5


def test_checkpoint_roundtrip(tmp_path):
    model = fleam.GruModel.random_init(4, 6, 3, seed=9)
    path = str(tmp_path / "model.bin")
    model.save(path)
    assert fleam.GruModel.load(path) == model


def test_error_mapping():
    with pytest.raises(ValueError):
        fleam.attack_cost_rate(1000, 180.0, 0.0, 0.0)  # zero mitigation time
    with pytest.raises(ValueError):
        fleam.offensive_firepower(1.0, 0.0)
