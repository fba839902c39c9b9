"""Smoke tests for the Python bindings: every exposed operation runs and the
values line up with the C++ test suite's expectations."""

import json
import math
import os

import pytest

import harmex

DATA = os.environ.get("HARMEX_DATA_DIR", "data")
HALFDISK = os.path.join(DATA, "halfdisk.json")


def test_exponents_table():
    t = harmex.exponents()
    assert t["beta_star"] == pytest.approx(0.9079, abs=2e-3)
    assert t["r_star"] == pytest.approx(0.8445, abs=2e-3)
    assert t["nu_star"] == pytest.approx(0.0778, abs=1e-3)
    assert t["m_star"] == pytest.approx(0.0712, abs=1e-3)
    assert t["cubic_residual"] <= 1e-8


def test_rate_functions_branches():
    chi, q, nu = harmex.rate_functions(0.9, 0.5)
    assert chi == pytest.approx(2.0631578947368423, rel=1e-12)
    assert q == pytest.approx(chi - 2.0, rel=1e-9)
    assert nu <= min(0.5 * (1 - 0.9) + 1e-15, chi - 2.0, 0.25)
    with pytest.raises(Exception):
        harmex.rate_functions(0.5, 0.5)  # beta below the valid interval


def test_sample_path_deterministic():
    a = harmex.sample_path(HALFDISK, 0.1, 7)
    b = harmex.sample_path(HALFDISK, 0.1, 7)
    assert a["steps"] == b["steps"]
    assert a["points"] == b["points"]
    assert a["steps"] > 10
    assert len(a["points"]) == 2 * a["steps"] + 1
    c = harmex.sample_path(HALFDISK, 0.1, 8)
    assert c["points"] != a["points"]


def test_extract_drive_shape():
    d = harmex.extract_drive(HALFDISK, 0.1, 7, t_max=0.3)
    t, w = d["t"], d["w"]
    assert len(t) == len(w)
    assert t[0] == 0.0 and w[0] == 0.0
    assert all(t2 > t1 for t1, t2 in zip(t, t[1:]))
    assert t[-1] >= 0.3


def test_sle_trace_runs_upward():
    c = harmex.sle_trace(0.25, 1e-3, 42)
    assert len(c["t"]) == len(c["x"]) == len(c["y"])
    assert c["y"][-1] > 0.0
    assert max(c["y"]) <= 2.0 * math.sqrt(4.0 * 0.25)  # comfortably bounded


def test_modulus_exceedance_range():
    f = harmex.modulus_exceedance(HALFDISK, 0.1, 3, samples=20, delta=0.3)
    assert 0.0 <= f <= 1.0
    assert f == harmex.modulus_exceedance(HALFDISK, 0.1, 3, samples=20, delta=0.3)


def test_run_experiment_tiny():
    cfg = {
        "domain": HALFDISK,
        "eps_list": [0.12, 0.1],
        "samples": 30,
        "capacity_T": 0.3,
        "t_grid": [0.1, 0.2],
        "observable_samples": 4,
        "trace_samples": 8,
        "delta_list": [0.3],
        "seed": 11,
    }
    rep = json.loads(harmex.run_experiment(json.dumps(cfg), threads=2))
    assert rep["schema"] == "explorer-convergence/1"
    assert len(rep["blocks"]) == 2
    assert rep["blocks"][0]["samples"] == 30
    assert {c["name"] for c in rep["criteria"]} >= {
        "variance-band", "ks-band", "trace-trend"}
    with pytest.raises(harmex.ConfigError):
        harmex.run_experiment(json.dumps(dict(cfg, samples=5)))
