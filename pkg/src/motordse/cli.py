"""Command-line driver: simulate, estimate, run.

Exit codes: 0 ok / fault-free, 1 config error, 2 numerical failure,
3 fault detected in a labeled interval, 4 malformed measurement CSV.
Rerunning the same config reproduces every output byte for byte.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .config import RunConfig, load_config
from .errors import ConfigError, CsvFormatError, EstimationError, SimulationError
from .estimation import sliding_detection
from .motor import steady_state_oracle
from .reports import (
    labeled_intervals,
    read_measurement_csv,
    render_report,
    summarize_interval,
    window_slack,
    write_ground_truth_csv,
    write_measurement_csv,
    write_plot_csv,
    write_window_csv,
)
from .simulate import DqSeries, FaultKind, run_scenario

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_FAULT = 3
EXIT_CSV = 4

PLOT_SPAN = (4.5, 5.75)


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    if getattr(args, "sim_seed", None) is not None:
        cfg = replace(cfg, sim=replace(cfg.sim, seed=args.sim_seed))
    if getattr(args, "dse_seed", None) is not None:
        new_dse = replace(cfg.dse, config=replace(cfg.dse.config,
                                                  seed=args.dse_seed))
        cfg = replace(cfg, dse=new_dse)
    return cfg


def _say(args, message: str) -> None:
    if not args.quiet:
        print(message)


def cmd_simulate(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rec = run_scenario(cfg.scenario())
    write_measurement_csv(out_dir / "measurements.csv", rec)
    if args.ground_truth:
        write_ground_truth_csv(out_dir / "ground_truth.csv", rec)

    slip, i_rms, te, wm = steady_state_oracle(
        cfg.motor, cfg.source.V_ll, cfg.source.f, cfg.load.T_m
    )
    _say(args, f"wrote {len(rec)} samples at {cfg.sim.f_sample:g} Hz "
               f"to {out_dir / 'measurements.csv'}")
    _say(args, f"loaded steady state (circuit oracle): slip={slip:.4f}, "
               f"I={i_rms:.2f} A rms, Te={te:.2f} N*m, wm={wm:.2f} rad/s")
    if cfg.fault.kind is not FaultKind.NONE:
        _say(args, f"fault {cfg.fault.kind.value} on phases "
                   f"{''.join(cfg.fault.phases)} during "
                   f"[{cfg.fault.t_on:g}, {cfg.fault.t_off:g}) s")
    return EXIT_OK


def _detect(cfg: RunConfig, measurements: np.ndarray):
    frame = cfg.source.frame()
    from .frames import ThreePhaseSample, abc_to_dq0

    t = measurements[:, 0]
    v = abc_to_dq0(ThreePhaseSample(t, measurements[:, 1],
                                    measurements[:, 2], measurements[:, 3]),
                   frame)
    i = abc_to_dq0(ThreePhaseSample(t, measurements[:, 4],
                                    measurements[:, 5], measurements[:, 6]),
                   frame)
    series = DqSeries(
        t=t, v_q=v.q, v_d=v.d, v_z=v.z, i_q=i.q, i_d=i.d, i_z=i.z,
        T_m=measurements[:, 7], omega_m=measurements[:, 8],
        omega=frame.omega,
    ).restrict(t_min=cfg.dse.t_start)
    if len(series) < cfg.dse.config.window:
        raise EstimationError(
            f"only {len(series)} samples at/after t_start={cfg.dse.t_start}; "
            f"window needs {cfg.dse.config.window}"
        )
    results = sliding_detection(series, cfg.motor, cfg.dse.config)
    dt_sample = float(series.t[1] - series.t[0])
    intervals = labeled_intervals(cfg, float(series.t[0]),
                                  float(series.t[-1]) + dt_sample)
    slack = window_slack(results)
    summaries = [
        summarize_interval(results, iv, cfg.dse.config.p_threshold, slack)
        for iv in intervals
    ]
    return results, summaries


def cmd_estimate(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    measurements = read_measurement_csv(args.measurements)
    results, summaries = _detect(cfg, measurements)
    write_window_csv(out_dir / "windows.csv", results)
    (out_dir / "report.txt").write_text(
        render_report(cfg, results, summaries), encoding="utf-8"
    )
    fault_found = False
    for s in summaries:
        _say(args, f"{s.name}: windows={s.n_windows} mean_J={s.mean_J:.4g} "
                   f"max_p={s.max_p:.4g} verdict={s.verdict}")
        if s.verdict == "fault":
            fault_found = True
    return EXIT_FAULT if fault_found else EXIT_OK


def cmd_run(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    rec = run_scenario(cfg.scenario())
    write_measurement_csv(out_dir / "measurements.csv", rec)
    write_ground_truth_csv(out_dir / "ground_truth.csv", rec)
    mask = (rec.t >= PLOT_SPAN[0] - 1e-9) & (rec.t <= PLOT_SPAN[1] + 1e-9)
    write_plot_csv(out_dir / "plot_voltage.csv", rec.t[mask],
                   {"va": rec.va[mask], "vb": rec.vb[mask],
                    "vc": rec.vc[mask]})
    write_plot_csv(out_dir / "plot_current.csv", rec.t[mask],
                   {"ia": rec.ia[mask], "ib": rec.ib[mask],
                    "ic": rec.ic[mask]})
    _say(args, f"simulated {len(rec)} samples -> {out_dir}")

    measurements = read_measurement_csv(out_dir / "measurements.csv")
    results, summaries = _detect(cfg, measurements)
    write_window_csv(out_dir / "windows.csv", results)
    (out_dir / "report.txt").write_text(
        render_report(cfg, results, summaries), encoding="utf-8"
    )
    fault_found = False
    for s in summaries:
        _say(args, f"{s.name}: windows={s.n_windows} mean_J={s.mean_J:.4g} "
                   f"max_p={s.max_p:.4g} verdict={s.verdict}")
        if s.verdict == "fault":
            fault_found = True
    return EXIT_FAULT if fault_found else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="motordse",
        description="Induction-motor fault simulation and "
                    "model-consistency fault detection.",
    )
    parser.add_argument("-q", "--quiet", action="store_true",
                        help="suppress progress output")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run a scenario, write CSVs")
    p_sim.add_argument("config", help="scenario .cfg file")
    p_sim.add_argument("-o", "--out-dir", default=".", help="output directory")
    p_sim.add_argument("--sim-seed", type=int, default=None,
                       help="override the simulation noise seed")
    p_sim.add_argument("--no-ground-truth", dest="ground_truth",
                       action="store_false",
                       help="skip the ground-truth CSV")
    p_sim.set_defaults(func=cmd_simulate, ground_truth=True)

    p_est = sub.add_parser("estimate",
                           help="score a measurement CSV window by window")
    p_est.add_argument("config", help="scenario .cfg file")
    p_est.add_argument("measurements", help="measurement CSV path")
    p_est.add_argument("-o", "--out-dir", default=".", help="output directory")
    p_est.add_argument("--dse-seed", type=int, default=None,
                       help="override the estimator init seed")
    p_est.set_defaults(func=cmd_estimate)

    p_run = sub.add_parser("run", help="simulate then estimate")
    p_run.add_argument("config", help="scenario .cfg file")
    p_run.add_argument("-o", "--out-dir", default=".", help="output directory")
    p_run.add_argument("--sim-seed", type=int, default=None)
    p_run.add_argument("--dse-seed", type=int, default=None)
    p_run.set_defaults(func=cmd_run)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CsvFormatError as exc:
        print(f"csv error: {exc}", file=sys.stderr)
        return EXIT_CSV
    except (SimulationError, EstimationError, np.linalg.LinAlgError,
            FloatingPointError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
