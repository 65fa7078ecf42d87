"""Shared fixtures: canonical scenarios simulated once per session."""

from __future__ import annotations

import time
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

import motordse as m
from motordse.cli import main as cli_main

CONFIG_DIR = Path(m.__file__).parent / "configs"
BUNDLED = ("no_fault", "ag_fault", "ab_fault", "abcg_fault")


def default_scenario(**overrides) -> m.Scenario:
    """The bundled machine and timeline with keyword tweaks."""
    base = dict(
        motor=m.DEFAULT_MOTOR,
        source=m.SourceSpec(R_src=0.5),
        load=m.LoadSpec(T_m=50.0, t_load=3.0),
        fault=m.FaultSpec(),
        sim=m.SimSpec(dt=5e-5, t_end=6.0, seed=1, sigma_v=3.76,
                      sigma_i=0.1, f_sample=100.0),
    )
    base.update(overrides)
    return m.Scenario(**base)


@pytest.fixture(scope="session")
def noisy_record():
    """Default noisy, unfaulted 6 s record."""
    sc = default_scenario()
    return sc, m.run_scenario(sc)


@pytest.fixture(scope="session")
def clean_record():
    """Noise-free, unfaulted 6 s record."""
    sc = default_scenario(sim=m.SimSpec(dt=5e-5, t_end=6.0, seed=1,
                                        sigma_v=0.0, sigma_i=0.0,
                                        f_sample=100.0))
    return sc, m.run_scenario(sc)


@pytest.fixture(scope="session")
def full_rate_record():
    """Short noise-free record keeping every integration step."""
    sc = default_scenario(
        load=m.LoadSpec(T_m=50.0, t_load=0.4),
        sim=m.SimSpec(dt=5e-5, t_end=1.0, seed=1, sigma_v=0.0,
                      sigma_i=0.0, f_sample=20000.0),
    )
    return sc, m.run_scenario(sc)


@pytest.fixture(scope="session")
def full_rate_ag_record():
    """Short noise-free record with a mid-record AG fault, full rate."""
    sc = default_scenario(
        load=m.LoadSpec(T_m=50.0, t_load=0.4),
        fault=m.FaultSpec(kind=m.FaultKind.LINE_GROUND, phases=("a",),
                          t_on=0.7, t_off=0.85),
        sim=m.SimSpec(dt=5e-5, t_end=1.0, seed=1, sigma_v=0.0,
                      sigma_i=0.0, f_sample=20000.0),
    )
    return sc, m.run_scenario(sc)


def ground_truth_states(rec: m.SimRecord, pole_pairs: int) -> np.ndarray:
    """(n, 6) ground-truth state matrix in the estimator's layout."""
    return np.column_stack((
        rec.gt_lam_qs, rec.gt_lam_ds, rec.gt_lam_qr, rec.gt_lam_dr,
        rec.gt_Te, pole_pairs * rec.wm,
    ))


@pytest.fixture(scope="session")
def bundled_runs(tmp_path_factory):
    """Each bundled config through the real CLI pipeline, timed."""
    root = tmp_path_factory.mktemp("bundled")
    runs = {}
    for name in BUNDLED:
        out = root / name
        t0 = time.perf_counter()
        code = cli_main(["-q", "run", str(CONFIG_DIR / f"{name}.cfg"),
                         "-o", str(out)])
        runs[name] = {
            "exit_code": code,
            "out_dir": out,
            "wall_s": time.perf_counter() - t0,
        }
    return runs


def read_windows_csv(path: Path):
    """Window results as a list of dicts."""
    rows = []
    lines = path.read_text().splitlines()
    header = lines[0].split(",")
    for line in lines[1:]:
        parts = line.split(",")
        row = dict(zip(header, parts))
        for key in ("t_start", "t_end", "J", "p"):
            row[key] = float(row[key])
        row["iterations"] = int(row["iterations"])
        row["dof"] = int(row["dof"])
        rows.append(row)
    return rows


def short_config_text(fault_kind="none", phases=()):
    """A fast (1.2 s) scenario for CLI round trips."""
    cfg = m.RunConfig(
        motor=m.DEFAULT_MOTOR,
        source=m.SourceSpec(R_src=0.5),
        load=m.LoadSpec(T_m=50.0, t_load=0.5),
        fault=m.FaultSpec(kind=fault_kind, phases=phases,
                          t_on=0.8, t_off=0.9),
        sim=m.SimSpec(dt=5e-5, t_end=1.2, seed=3, sigma_v=3.76,
                      sigma_i=0.1, f_sample=100.0),
        dse=m.DseSettings(config=m.DseConfig(), t_start=0.45),
    )
    return m.dump_config(cfg)
