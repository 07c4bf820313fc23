import json
import math
import pathlib

import jsonschema
import numpy as np
import pytest

import gvcontrol

ROOT = pathlib.Path(__file__).resolve().parents[2]
SCHEMA = json.loads((ROOT / "docs" / "summary_schema.json").read_text())


def test_demo_registry():
    assert "synthetic_lq" in gvcontrol.demo_names()
    assert len(gvcontrol.demo_names()) == 6


def test_exponential_state():
    r = gvcontrol.solve_demo("exponential", 32, 32)
    y = r["y"][:, :, 0]
    s = np.asarray(r["s"])
    assert y.shape == (33, 33)
    assert np.max(np.abs(y - np.exp(s)[:, None])) < 2e-3


def test_unknown_demo_raises_value_error():
    with pytest.raises(ValueError, match="nope"):
        gvcontrol.solve_demo("nope")


def test_gronwall_series_matches_bessel_sum():
    ref = sum(1.0 / math.factorial(k) ** 2 for k in range(30))
    assert abs(gvcontrol.gronwall_solve(1, 0, 0, 1, 1, 1) - ref) < 1e-12
    c = gvcontrol.gronwall_coeffs(1, 0.5, 0.25, 1.0, 3, 3)
    assert c[1][1] == 2 * 0.5 * 0.25 + 1.0


def test_choose_mu_reaches_target():
    mu = gvcontrol.choose_mu(1, 1, 1, 1, 1, 0.5)
    assert gvcontrol.contraction_factor(1, 1, 1, 1, 1, mu) <= 0.5 + 1e-12


def test_optimize_decreases_cost():
    r = gvcontrol.optimize_demo("synthetic_lq", 8, 8, seed=3, max_outer=50)
    assert r["J_final"] <= r["J_initial"]


@pytest.mark.parametrize("command", ["solve", "gradcheck", "optimize", "gronwall"])
def test_cli_summary_matches_schema(tmp_path, command):
    cfg = {"problem": "synthetic_lq", "grid": {"Ns": 8, "Nt": 8}, "gradcheck": {"directions": 3}}
    code, summary = gvcontrol.run(command, cfg, tmp_path / "out")
    assert code == 0
    jsonschema.validate(summary, SCHEMA)
    assert summary["command"] == command
    for name in summary["files"]:
        assert (tmp_path / "out" / name).is_file()


def test_cli_config_error_exit_code(tmp_path):
    code, out, err = gvcontrol.run_cli(["solve", str(tmp_path / "missing.json")])
    assert code == 1
    assert "missing.json" in err


def test_example_configs_parse(tmp_path):
    for path in sorted((ROOT / "examples_config").glob("*.json")):
        code, out, err = gvcontrol.run_cli(["gronwall", str(path), "--out-dir", str(tmp_path / path.stem)])
        assert code in (0, 3), err
