"""Acceptance gate: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
summary values.
"""

import math

import numpy as np
import pytest
from scipy import integrate

import motordse as m
from motordse.estimation import residual_dof, window_at

from conftest import (
    default_scenario,
    ground_truth_states,
    read_windows_csv,
    CONFIG_DIR,
)
from motordse.cli import main as cli_main


def _ok(criterion: int, detail: str) -> None:
    print(f"[criterion {criterion:2d}] PASS  {detail}")


# ---------------------------------------------------------------- criterion 1
def test_criterion_1_steady_state_fidelity(bundled_runs):
    sc = default_scenario(
        source=m.SourceSpec(R_src=1e-3),
        sim=m.SimSpec(dt=5e-5, t_end=6.0, seed=1, sigma_v=0.0, sigma_i=0.0,
                      f_sample=100.0),
    )
    rec = m.run_scenario(sc)
    slip, i_rms, _, omega_m = m.steady_state_oracle(
        sc.motor, sc.source.V_ll, sc.source.f, sc.load.T_m)

    mask = (rec.t >= 4.5) & (rec.t <= 5.0)
    wm_sim = float(rec.wm[mask].mean())
    series = m.to_dq_series(rec, sc.source.frame())
    i_sim = float(np.mean(np.hypot(series.i_q[mask], series.i_d[mask]))
                  / math.sqrt(2.0))

    wm_err = abs(wm_sim - omega_m) / omega_m
    i_err = abs(i_sim - i_rms) / i_rms
    assert wm_err < 0.01, f"rotor speed off by {wm_err:.2%}"
    assert i_err < 0.02, f"stator current off by {i_err:.2%}"
    slowest = max(r["wall_s"] for r in bundled_runs.values())
    assert slowest < 60.0, f"slowest scenario pipeline took {slowest:.1f} s"
    _ok(1, f"speed err {wm_err:.2e}, current err {i_err:.2e}, "
           f"slowest pipeline {slowest:.1f} s")


# ---------------------------------------------------------------- criterion 2
def test_criterion_2_integrator_order():
    def final_states(dt):
        sc = default_scenario(
            load=m.LoadSpec(T_m=50.0, t_load=10.0),
            sim=m.SimSpec(dt=dt, t_end=0.3, seed=1, sigma_v=0.0,
                          sigma_i=0.0, f_sample=2500.0),
        )
        rec = m.run_scenario(sc)
        return np.column_stack((rec.gt_lam_qs, rec.gt_lam_ds, rec.gt_lam_qr,
                                rec.gt_lam_dr, rec.wm))

    ref = final_states(1e-5)
    err_h = np.max(np.abs(final_states(8e-5) - ref))
    err_h2 = np.max(np.abs(final_states(4e-5) - ref))
    ratio = err_h / err_h2
    assert 3.5 <= ratio <= 4.5, f"self-convergence ratio {ratio:.2f}"
    _ok(2, f"halving dt shrinks start-transient error by {ratio:.2f}x")


# ---------------------------------------------------------------- criterion 3
def test_criterion_3_transform_exactness():
    rng = np.random.default_rng(2024)
    frame = m.FrameAngle(theta0=rng.uniform(-math.pi, math.pi), omega=377.0)
    t = rng.uniform(0.0, 1.0, 1000)
    abc = rng.normal(0.0, 300.0, (1000, 3))
    dq = m.abc_to_dq0(m.ThreePhaseSample(t, abc[:, 0], abc[:, 1], abc[:, 2]),
                      frame)
    back = m.dq0_to_abc(dq, frame)
    rel = max(
        np.max(np.abs(back.a - abc[:, 0])),
        np.max(np.abs(back.b - abc[:, 1])),
        np.max(np.abs(back.c - abc[:, 2])),
    ) / np.max(np.abs(abc))
    assert rel <= 1e-12, f"round-trip error {rel:.2e}"

    v_pk = 460.0 * math.sqrt(2.0 / 3.0)
    worst = 0.0
    f60 = m.FrameAngle.from_frequency(60.0)
    for t_probe in np.linspace(0.0, 0.05, 17):
        img = m.abc_to_dq0(m.balanced_source(460.0, f60, t_probe), f60)
        worst = max(worst, abs(float(img.q) - v_pk), abs(float(img.d)),
                    abs(float(img.z)))
    assert worst <= 1e-9, f"balanced-source image error {worst:.2e}"
    _ok(3, f"round-trip rel err {rel:.1e}, source image err {worst:.1e}")


# ---------------------------------------------------------------- criterion 4
def test_criterion_4_residual_floor_at_ground_truth(clean_record):
    sc, rec = clean_record
    series = m.to_dq_series(rec, sc.source.frame())
    x = ground_truth_states(rec, sc.motor.pole_pairs)
    cfg = m.DseConfig()
    worst = 0.0
    for k0 in range(150, 597, 3):  # every unfaulted window past start-up
        w = window_at(series, k0, cfg.window)
        eps = m.build_residual(x[k0:k0 + cfg.window].ravel(), w, sc.motor, cfg)
        worst = max(worst, float(np.max(np.abs(eps))))
    assert worst <= 1e-3, f"weighted residual floor {worst:.2e}"
    _ok(4, f"max weighted residual at ground truth {worst:.2e}")


# ---------------------------------------------------------------- criterion 5
def test_criterion_5_jacobian_correctness(noisy_record):
    rng = np.random.default_rng(99)
    a = rng.normal(size=(9, 6))
    jac = m.numerical_jacobian(lambda x: a @ x, rng.normal(size=6))
    lin_err = float(np.max(np.abs(jac - a)))
    assert lin_err <= 1e-9

    sc, rec = noisy_record
    series = m.to_dq_series(rec, sc.source.frame())
    cfg = m.DseConfig()
    w = window_at(series, 360, cfg.window)
    x = rng.normal(0.0, 0.5, 30)

    def f(xv):
        return m.build_residual(xv, w, sc.motor, cfg)

    jac = m.numerical_jacobian(f, x)
    f0 = f(x)
    fwd = np.empty_like(jac)
    for j in range(x.size):
        h = 1e-7 * max(abs(x[j]), 1.0)
        xp = x.copy()
        xp[j] += h
        fwd[:, j] = (f(xp) - f0) / h
    rel = float(np.linalg.norm(jac - fwd, "fro") / np.linalg.norm(jac, "fro"))
    assert rel <= 1e-4, f"central vs one-sided disagreement {rel:.2e}"
    _ok(5, f"linear-map err {lin_err:.1e}, FD cross-check {rel:.1e}")


# ---------------------------------------------------------------- criterion 6
def test_criterion_6_chi_squared_accuracy():
    def density(x, k):
        return (x ** (k / 2.0 - 1.0) * math.exp(-x / 2.0)
                / (2.0 ** (k / 2.0) * math.gamma(k / 2.0)))

    for j, k in ((5.991, 2), (3.841, 1)):
        got = m.chi_squared_cdf(j, k)
        # x = u^2 keeps the k = 1 endpoint smooth for the quadrature
        oracle = integrate.quad(
            lambda u: 2.0 * u * density(u * u, k), 0.0, math.sqrt(j))[0]
        assert got == pytest.approx(0.950, abs=1e-3)
        assert got == pytest.approx(oracle, abs=1e-9)
    for k in (1, 2, 15):
        grid = [m.chi_squared_cdf(j, k) for j in np.linspace(0.0, 80.0, 200)]
        assert all(b >= a for a, b in zip(grid, grid[1:]))
    _ok(6, "F2(5.991) and F1(3.841) at 0.950 +/- 0.001, monotone in J")


# ---------------------------------------------------------------- criterion 7
def test_criterion_7_detection_separation(bundled_runs):
    details = []
    no_fault = read_windows_csv(
        bundled_runs["no_fault"]["out_dir"] / "windows.csv")
    false_alarms = [r for r in no_fault if r["verdict"] == "fault"]
    assert not false_alarms, f"{len(false_alarms)} false fault verdicts"
    assert bundled_runs["no_fault"]["exit_code"] == 0

    for name in ("ag_fault", "ab_fault", "abcg_fault"):
        rows = read_windows_csv(bundled_runs[name]["out_dir"] / "windows.csv")
        pre = [r["J"] for r in rows
               if r["t_start"] >= 3.5 and r["t_end"] < 5.0]
        dur = [r for r in rows if r["t_start"] >= 5.0 and r["t_end"] < 5.25]
        ratio = float(np.mean([r["J"] for r in dur]) / np.mean(pre))
        n_flagged = sum(r["verdict"] == "fault" for r in dur)
        assert ratio >= 10.0, f"{name}: separation {ratio:.1f}x"
        assert n_flagged >= 1, f"{name}: no fault verdict inside the window"
        assert bundled_runs[name]["exit_code"] == 3
        details.append(f"{name} {ratio:.0f}x/{n_flagged} flagged")
    _ok(7, "no-fault clean; " + ", ".join(details))


# ---------------------------------------------------------------- criterion 8
def test_criterion_8_estimation_accuracy(noisy_record, bundled_runs):
    sc, rec = noisy_record
    series = m.to_dq_series(rec, sc.source.frame()).restrict(4.0, 5.0)
    cfg = m.DseConfig()
    results = m.sliding_detection(series, sc.motor, cfg)
    offset = int(round(4.0 * 100))
    x_true = ground_truth_states(rec, sc.motor.pole_pairs)
    num = den = 0.0
    for idx, res in enumerate(results):
        sl = slice(offset + idx, offset + idx + cfg.window)
        err = res.x_hat[:, :4] - x_true[sl, :4]
        num += float(np.sum(err ** 2))
        den += float(np.sum(x_true[sl, :4] ** 2))
    flux_rel = math.sqrt(num / den)
    assert flux_rel <= 0.02, f"flux rms error {flux_rel:.2%}"

    no_fault = read_windows_csv(
        bundled_runs["no_fault"]["out_dir"] / "windows.csv")
    conv = np.mean([r["converged"] == "true" for r in no_fault])
    assert conv >= 0.95, f"convergence rate {conv:.1%}"
    _ok(8, f"flux rms err {flux_rel:.2%}, convergence rate {conv:.1%}")


# ---------------------------------------------------------------- criterion 9
def test_criterion_9_dof_accounting():
    for n in range(2, 11):
        assert residual_dof(n, False) == 3 * n - 4
        assert residual_dof(n, True) == 4 * n - 5
    _ok(9, "m - n equals 3N-4 (speed rows off) and 4N-5 (on), N in 2..10")


# --------------------------------------------------------------- criterion 10
def test_criterion_10_end_to_end_determinism(bundled_runs, tmp_path):
    again = tmp_path / "ag_repeat"
    code = cli_main(["-q", "run", str(CONFIG_DIR / "ag_fault.cfg"),
                     "-o", str(again)])
    assert code == bundled_runs["ag_fault"]["exit_code"]
    first = bundled_runs["ag_fault"]["out_dir"]
    for name in ("measurements.csv", "ground_truth.csv", "windows.csv",
                 "report.txt", "plot_voltage.csv", "plot_current.csv"):
        assert ((first / name).read_bytes()
                == (again / name).read_bytes()), f"{name} differs between runs"

    # equal seeds: fault scenario matches the baseline before fault onset
    base = (bundled_runs["no_fault"]["out_dir"] / "measurements.csv")
    lines_nf = base.read_text().splitlines()
    lines_ag = (first / "measurements.csv").read_text().splitlines()
    n_prefault = 1 + int(5.0 * 100)  # header plus rows with t < 5 s
    assert lines_nf[:n_prefault] == lines_ag[:n_prefault]
    _ok(10, "byte-identical rerun; fault record matches baseline before t_on")
