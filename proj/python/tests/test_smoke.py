import math
from pathlib import Path

import numpy as np
import pytest

import fastreact as fr

CONFIGS = Path(__file__).resolve().parents[2] / "configs"


def test_run_shapes_and_invariants():
    spec = fr.canonical_problem(points=101, k=1e3, T=0.02)
    out = fr.run(spec)
    u0, v0 = fr.initial_data(spec)
    assert out["u"].shape == (len(out["t"]), 101)
    assert out["v"].shape == out["u"].shape
    assert out["t"][0] == 0.0 and out["t"][-1] == pytest.approx(0.02)
    assert np.all(np.diff(out["v"], axis=0) <= 0.0)
    assert out["u"].min() >= 0.0
    assert out["u"].max() <= u0.max() + 1e-10
    assert out["dt"] == fr.policy_dt(spec)


def test_config_round_trip_and_errors():
    spec = fr.load_problem(str(CONFIGS / "p1.toml"), ["params.k=100"])
    assert spec.k == 100.0
    assert fr.parse_problem(spec.to_toml()) == spec
    with pytest.raises(fr.ConfigError):
        fr.parse_problem(spec.to_toml(), ["params.bogus=1"])
    with pytest.raises(fr.Error):
        fr.load_problem("/nonexistent.toml")


def test_reaction_against_oracle():
    u, v = 1.0, 1.0
    for _ in range(2000):
        u, v = fr.reaction_substep(u, v, 10.0, 1.0, 2.0, 2.5e-4)
    ur, vr = fr.point_ode_oracle(1.0, 1.0, 10.0, 1.0, 2.0, 0.5)
    assert abs(u - ur) < 1e-4 and abs(v - vr) < 1e-4
    assert fr.v_exact_update(1.0, math.log(2.0), 1.0) == pytest.approx(0.5, rel=1e-15)
    with pytest.raises(fr.DomainError):
        fr.v_exact_update(-1.0, 1.0, 1.0)


def test_barriers():
    p = fr.cosh_barrier(1.0, 4.0, 1e10)
    assert p["report"]["all_pass"]
    assert p["U"][0] == pytest.approx(1e-20, rel=1e-14)
    q = fr.ode_barrier(0.5, 1.0, 2.0, 1e6)
    names = {c["name"]: c for c in q["report"]["conditions"]}
    assert names["first_integral"]["value"] <= 1e-6
    t = fr.traveling_supersolution(1e30, s=0.125, b3=0.5)
    assert t["report"]["all_pass"]
    assert np.all(np.diff(t["V"]) <= 0.0)


def test_sweep_and_pairs():
    spec = fr.canonical_problem(points=101, k=1e3, T=0.02)
    r = fr.k_sweep(spec, [1e2, 1e3])
    assert len(r["entries"]) == 2
    assert r["entries"][1]["sup_u_err"] < r["entries"][0]["sup_u_err"]
    pairs = fr.random_ordered_pairs(spec, pairs=2)
    assert pairs["pass"] and len(pairs["reports"]) == 2
