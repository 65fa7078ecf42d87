"""Flat-file outputs: measurement CSV, window results CSV, detection report.

The report is a machine-readable flat document of ``dotted.key = value``
lines; the ``config.*`` keys echo the full run configuration and reparse to
an equivalent RunConfig.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import __version__
from .config import RunConfig, parse_config_text
from .errors import CsvFormatError
from .estimation import EstimationResult, VERDICT_FAULT
from .simulate import FaultKind, SimRecord

MEASUREMENT_HEADER = "t,va,vb,vc,ia,ib,ic,Tm,wm"
GROUND_TRUTH_HEADER = "t,lqs,lds,lqr,ldr,Te,wm"
WINDOW_HEADER = "t_start,t_end,iterations,converged,J,dof,p,verdict"


def _num(x: float) -> str:
    # >= 12 significant digits, fixed width
    return format(float(x), ".14e")


def write_measurement_csv(path, rec: SimRecord) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(MEASUREMENT_HEADER + "\n")
        for k in range(len(rec)):
            fh.write(",".join(_num(v) for v in (
                rec.t[k], rec.va[k], rec.vb[k], rec.vc[k],
                rec.ia[k], rec.ib[k], rec.ic[k], rec.Tm[k], rec.wm[k],
            )) + "\n")


def write_ground_truth_csv(path, rec: SimRecord) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(GROUND_TRUTH_HEADER + "\n")
        for k in range(len(rec)):
            fh.write(",".join(_num(v) for v in (
                rec.t[k], rec.gt_lam_qs[k], rec.gt_lam_ds[k],
                rec.gt_lam_qr[k], rec.gt_lam_dr[k], rec.gt_Te[k], rec.wm[k],
            )) + "\n")


def read_measurement_csv(path) -> np.ndarray:
    """Read a measurement CSV into an (n, 9) array.

    The header must match the documented schema exactly; a missing or
    renamed column is reported by name.
    """
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\r\n")
        if header != MEASUREMENT_HEADER:
            got = header.split(",")
            expected = MEASUREMENT_HEADER.split(",")
            missing = [c for c in expected if c not in got]
            if missing:
                raise CsvFormatError(
                    f"{path}: missing column(s) {', '.join(missing)}; "
                    f"expected header {MEASUREMENT_HEADER!r}"
                )
            raise CsvFormatError(
                f"{path}: header {header!r} does not match "
                f"{MEASUREMENT_HEADER!r}"
            )
        rows = []
        for ln, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 9:
                raise CsvFormatError(
                    f"{path}:{ln}: expected 9 fields, got {len(parts)}"
                )
            try:
                rows.append([float(p) for p in parts])
            except ValueError as exc:
                raise CsvFormatError(f"{path}:{ln}: {exc}") from exc
    if len(rows) < 2:
        raise CsvFormatError(f"{path}: fewer than 2 data rows")
    return np.asarray(rows, dtype=float)


def write_window_csv(path, results: list) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(WINDOW_HEADER + "\n")
        for r in results:
            fh.write(
                f"{_num(r.t_start)},{_num(r.t_end)},{r.iterations},"
                f"{'true' if r.converged else 'false'},{_num(r.J_cost)},"
                f"{r.dof},{_num(r.p)},{r.verdict}\n"
            )


@dataclass(frozen=True)
class Interval:
    name: str
    t_lo: float
    t_hi: float


def labeled_intervals(cfg: RunConfig, t_first: float, t_stop: float) -> list:
    """Pre-fault / fault / post-fault spans derived from the fault spec.

    ``t_stop`` is exclusive; pass one sample period past the last sample so
    the final window counts as inside the last interval.
    """
    if cfg.fault.kind is FaultKind.NONE:
        return [Interval("pre_fault", t_first, t_stop)]
    out = []
    if cfg.fault.t_on > t_first:
        out.append(Interval("pre_fault", t_first, cfg.fault.t_on))
    out.append(Interval("fault", cfg.fault.t_on, cfg.fault.t_off))
    if t_stop > cfg.fault.t_off:
        out.append(Interval("post_fault", cfg.fault.t_off, t_stop))
    return out


@dataclass
class IntervalSummary:
    name: str
    t_lo: float
    t_hi: float
    n_windows: int
    mean_J: float
    max_J: float
    mean_p: float
    max_p: float
    verdict: str


def windows_inside(results: list, iv: Interval, slack: float) -> list:
    """Windows whose samples all fall inside [t_lo, t_hi)."""
    return [
        r for r in results
        if r.t_start >= iv.t_lo - slack and r.t_end < iv.t_hi - slack
    ]


def summarize_interval(results: list, iv: Interval,
                       p_threshold: float, slack: float) -> IntervalSummary:
    """Aggregate verdict: the max p over windows fully inside the span."""
    inside = [r for r in windows_inside(results, iv, slack)
              if np.isfinite(r.p)]
    if not inside:
        return IntervalSummary(iv.name, iv.t_lo, iv.t_hi, 0,
                               float("nan"), float("nan"),
                               float("nan"), float("nan"), "empty")
    costs = [r.J_cost for r in inside]
    ps = [r.p for r in inside]
    max_p = max(ps)
    verdict = VERDICT_FAULT if max_p >= p_threshold else "healthy"
    return IntervalSummary(
        iv.name, iv.t_lo, iv.t_hi, len(inside),
        float(np.mean(costs)), float(np.max(costs)),
        float(np.mean(ps)), max_p, verdict,
    )


def window_slack(results: list) -> float:
    """Half a sample period, for robust float comparisons at interval edges."""
    if len(results) < 1:
        return 0.0
    r = results[0]
    n = r.x_hat.shape[0]
    return 0.5 * (r.t_end - r.t_start) / max(n - 1, 1)


def render_report(cfg: RunConfig, results: list,
                  summaries: list) -> str:
    """Dotted key-value report with a reparseable config echo."""
    from .config import _SCHEMA  # stable field list

    lines = [
        "report.format = motordse.report.v1",
        f"report.version = {__version__}",
    ]
    for section, keys in _SCHEMA.items():
        for key, (_, fmt) in keys.items():
            if section == "dse":
                value = (cfg.dse.t_start if key == "t_start"
                         else getattr(cfg.dse.config, key))
            else:
                value = getattr(getattr(cfg, section), key)
            lines.append(f"config.{section}.{key} = {fmt(value)}")

    n_ok = sum(1 for r in results if r.error is None)
    n_conv = sum(1 for r in results if r.converged)
    lines.append(f"windows.count = {len(results)}")
    lines.append(f"windows.solved = {n_ok}")
    lines.append(f"windows.converged = {n_conv}")
    any_fault = False
    for s in summaries:
        base = f"interval.{s.name}"
        lines.append(f"{base}.t_lo = {s.t_lo!r}")
        lines.append(f"{base}.t_hi = {s.t_hi!r}")
        lines.append(f"{base}.windows = {s.n_windows}")
        lines.append(f"{base}.mean_J = {s.mean_J!r}")
        lines.append(f"{base}.max_J = {s.max_J!r}")
        lines.append(f"{base}.mean_p = {s.mean_p!r}")
        lines.append(f"{base}.max_p = {s.max_p!r}")
        lines.append(f"{base}.verdict = {s.verdict}")
        if s.verdict == VERDICT_FAULT:
            any_fault = True
    lines.append(f"overall.fault_detected = {'true' if any_fault else 'false'}")
    return "\n".join(lines) + "\n"


def parse_report_config(text: str) -> RunConfig:
    """Rebuild the RunConfig from a report's ``config.*`` echo lines."""
    sections: dict = {}
    for line in text.splitlines():
        if not line.startswith("config."):
            continue
        key_part, _, value = line.partition("=")
        dotted = key_part.strip()[len("config."):]
        section, _, key = dotted.partition(".")
        sections.setdefault(section, []).append(f"{key} = {value.strip()}")
    chunks = []
    for section, entries in sections.items():
        chunks.append(f"[{section}]")
        chunks.extend(entries)
        chunks.append("")
    return parse_config_text("\n".join(chunks), origin="<report echo>")


def write_plot_csv(path, t: np.ndarray, channels: dict) -> None:
    """Small plot-ready CSV: time column plus named channels."""
    names = list(channels)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("t," + ",".join(names) + "\n")
        for k in range(len(t)):
            vals = ",".join(_num(channels[name][k]) for name in names)
            fh.write(f"{_num(t[k])},{vals}\n")
