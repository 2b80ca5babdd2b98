import math

import pytest

cardiosdc = pytest.importorskip("cardiosdc")


def small_config():
    c = cardiosdc.default_config(cardiosdc.ModelKind.monodomain)
    c.cells = (16, 16)
    c.extent = (8.0, 8.0)
    c.time_step = 0.25
    c.end_time = 1.0
    c.tol = 1e-3
    c.snapshot_every = 0
    return c


def test_nodes_and_weights():
    assert cardiosdc.radau_iia_nodes(1) == [1.0]
    nodes = cardiosdc.radau_iia_nodes(2)
    assert nodes[0] == pytest.approx(1.0 / 3.0, abs=1e-14)
    mats = cardiosdc.collocation_matrices(2)
    assert mats["S"].shape == (2, 3)
    assert mats["S"][0, 1] == pytest.approx(5.0 / 12.0, abs=1e-14)
    assert mats["S"][1, 2] == pytest.approx(1.0 / 3.0, abs=1e-14)


def test_adaptivity_helpers():
    assert cardiosdc.drop_tolerance(cardiosdc.DropMode.empirical, 1e-4) == pytest.approx(1e-5)
    assert cardiosdc.drop_tolerance(cardiosdc.DropMode.off, 1e-4) == 0.0
    assert cardiosdc.required_sweeps(1.0, 0.05, 1e-4) == 4
    assert cardiosdc.estimate_rho([1.0]) == 0.05
    assert cardiosdc.check_termination(0.0, 0.05, 1e-4)


def test_config_round_trip():
    c = small_config()
    back = cardiosdc.parse_config(c.to_text())
    assert back.to_text() == c.to_text()
    assert back.hash() == c.hash()
    with pytest.raises(ValueError):
        cardiosdc.parse_config("[sdc]\nbogus = 1\n")


def test_run_and_step_agree():
    c = small_config()
    result = cardiosdc.run(c)
    assert len(result["steps"]) == 4
    assert all(s["converged"] for s in result["steps"])
    assert result["t"] == pytest.approx(1.0)

    sim = cardiosdc.Simulation(c)
    u, w = sim.initial_condition()
    assert len(u) == sim.dofs == result["dofs"]
    for k in range(1, 5):
        u, w, log = sim.step(u, w, k, (k - 1) * c.time_step)
        assert log["active_dofs"][0] == sim.dofs
    assert max(abs(a - b) for a, b in zip(u, result["u"])) == 0.0


def test_rest_state():
    sim = cardiosdc.Simulation(small_config())
    u = [0.0] * sim.dofs
    w = [0.0] * sim.dofs
    u, w, log = sim.step(u, w, 1, 0.0)
    assert log["sweeps"] == 1
    assert max(map(abs, u)) == 0.0


def test_ionic_current():
    assert cardiosdc.i_ion(0.5, 0.0) == pytest.approx(-0.8)
    assert math.isfinite(cardiosdc.r_gate(0.5, 0.2))
