"""Solvers for Goursat-Volterra state equations and their optimal control."""

import json

from ._gvcontrol import (
    DivergenceError,
    InvalidArgument,
    NumericalError,
    choose_mu,
    contraction_factor,
    demo_names,
    gronwall_bound,
    gronwall_bound_separable,
    gronwall_coeffs,
    gronwall_solve,
    optimize_demo,
    run_cli,
    solve_demo,
)

__all__ = [
    "DivergenceError",
    "InvalidArgument",
    "NumericalError",
    "choose_mu",
    "contraction_factor",
    "demo_names",
    "gronwall_bound",
    "gronwall_bound_separable",
    "gronwall_coeffs",
    "gronwall_solve",
    "optimize_demo",
    "run",
    "run_cli",
    "solve_demo",
]


def run(command, config, out_dir):
    """Run a gvctl command on a config dict; returns (exit_code, summary)."""
    import os
    import tempfile

    with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
        json.dump(config, fh)
        path = fh.name
    try:
        code, out, err = run_cli([command, path, "--out-dir", str(out_dir)])
    finally:
        os.unlink(path)
    if not out.strip():
        raise RuntimeError(err.strip() or f"gvctl {command} exited with {code}")
    return code, json.loads(out)
