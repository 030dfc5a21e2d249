"""Smoke tests for the python wrapper around the compiled core."""

import math
import os
import pathlib

import pytest

import kgflow

PRESETS = pathlib.Path(os.environ.get("KGFLOW_PRESETS", "presets"))

SMALL_FLOW = """
geometry.tag = euclidean_product
domain.dim = 1
domain.x1_min = 0
domain.x1_max = 1
domain.n1 = 17
problem.u0 = 0.1 * cos(pi * x)
problem.phi = 0
run.dt = 2e-3
run.t_end = 0.05
"""


def test_verify_battery(tmp_path):
    rep = kgflow.run("verify", str(PRESETS / "grim_reaper.cfg"), out_dir=str(tmp_path))
    assert rep["command"] == "verify"
    assert rep["all_pass"] is True
    assert (tmp_path / "verify.csv").exists()
    assert (tmp_path / "report.json").exists()


def test_flow_artifacts_and_report(tmp_path):
    rep = kgflow.run_text("flow", SMALL_FLOW, out_dir=str(tmp_path))
    assert rep["steps"] == 25
    assert rep["stop_reason"] == "t_end"
    assert rep["energy_final"] <= rep["energy_initial"]
    series = (tmp_path / "series.csv").read_text().splitlines()
    assert series[0] == "t,max_abs_ut,energy,max_abs_grad,u_min,u_max"
    assert len(series) == 1 + 1 + rep["steps"]  # header + t=0 row + one per step


def test_soliton_speed(tmp_path):
    rep = kgflow.run(
        "soliton", str(PRESETS / "grim_reaper.cfg"), out_dir=str(tmp_path), resolution=65
    )
    assert abs(rep["C"] - 1.0) < 2e-3
    assert rep["speed_error"] < 2e-3
    assert (tmp_path / "solution.csv").exists()
    assert (tmp_path / "speed.csv").exists()


def test_speed_of_flat_state(tmp_path):
    rep = kgflow.run("speed", str(PRESETS / "grim_reaper.cfg"), out_dir=str(tmp_path))
    # flat initial data: C = boundary flux over volume = sin(1)
    assert abs(rep["C"] - math.sin(1.0)) < 1e-12


def test_config_error_is_value_error():
    with pytest.raises(ValueError):
        kgflow.run_text("flow", "domain.dim = 7\n")


def test_canonical_config_round_trip():
    canon = kgflow.canonical_config("domain.dim = 1\ngeometry.tag = euclidean_product\n")
    assert kgflow.canonical_config(canon) == canon
    assert "domain.dim = 1" in canon
