"""Time-domain simulation of an induction motor behind a resistive source.

The electrical network is the single-bus arrangement used throughout the
package: an ideal balanced source behind a per-phase resistance ``R_src``
feeds the machine terminals, and a shunt fault block (per-phase resistance
``R_f`` into a common star point, optionally grounded through ``R_g``) can
be switched in on a time window.  The machine is integrated with the
implicit trapezoidal rule; the terminal network equation is solved inside
the corrector iteration so the coupled system stays second-order accurate.

Recorded measurement channels are the terminal line-ground voltages and the
*source* currents (motor plus fault current), which is what a relay at the
bus would see.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import SimulationError
from .frames import ALPHA, FrameAngle, ThreePhaseSample, abc_to_dq0, balanced_source
from .motor import MotorParams


class FaultKind(str, Enum):
    NONE = "none"
    LINE_GROUND = "line_ground"
    LINE_LINE = "line_line"
    LINE_LINE_GROUND = "line_line_ground"
    THREE_PHASE_GROUND = "three_phase_ground"


_PHASE_INDEX = {"a": 0, "b": 1, "c": 2}

_PHASE_COUNT = {
    FaultKind.NONE: 0,
    FaultKind.LINE_GROUND: 1,
    FaultKind.LINE_LINE: 2,
    FaultKind.LINE_LINE_GROUND: 2,
    FaultKind.THREE_PHASE_GROUND: 3,
}

_GROUNDED = {
    FaultKind.LINE_GROUND,
    FaultKind.LINE_LINE_GROUND,
    FaultKind.THREE_PHASE_GROUND,
}


@dataclass(frozen=True)
class FaultSpec:
    """Shunt fault applied at the machine terminals on [t_on, t_off)."""

    kind: FaultKind = FaultKind.NONE
    phases: tuple = ()
    R_f: float = 5.0
    R_g: float = 0.1
    t_on: float = 5.0
    t_off: float = 5.25

    def __post_init__(self):
        kind = FaultKind(self.kind)
        object.__setattr__(self, "kind", kind)
        phases = tuple(str(p).lower() for p in self.phases)
        object.__setattr__(self, "phases", phases)
        for p in phases:
            if p not in _PHASE_INDEX:
                raise ValueError(f"unknown phase {p!r}, expected a/b/c")
        if len(set(phases)) != len(phases):
            raise ValueError("duplicate phase in fault spec")
        if len(phases) != _PHASE_COUNT[kind]:
            raise ValueError(
                f"fault kind {kind.value} requires {_PHASE_COUNT[kind]} "
                f"phase(s), got {len(phases)}"
            )
        if kind is not FaultKind.NONE:
            if self.R_f <= 0.0:
                raise ValueError("fault resistance R_f must be positive")
            if self.R_g < 0.0:
                raise ValueError("ground resistance R_g must be non-negative")
            if not self.t_on < self.t_off:
                raise ValueError("fault window requires t_on < t_off")


@dataclass(frozen=True)
class SourceSpec:
    """Ideal balanced source behind a per-phase resistance."""

    V_ll: float = 460.0
    f: float = 60.0
    theta0: float = 0.0
    R_src: float = 0.5

    def __post_init__(self):
        if self.V_ll <= 0.0 or self.f <= 0.0:
            raise ValueError("V_ll and f must be positive")
        if self.R_src <= 0.0:
            raise ValueError("source resistance R_src must be positive")

    def frame(self) -> FrameAngle:
        return FrameAngle.from_frequency(self.f, self.theta0)


@dataclass(frozen=True)
class LoadSpec:
    """Constant-torque load switched in at t_load."""

    T_m: float = 50.0
    t_load: float = 3.0

    def __post_init__(self):
        if self.T_m < 0.0:
            raise ValueError("load torque must be non-negative")
        if self.t_load < 0.0:
            raise ValueError("t_load must be non-negative")

    def torque_at(self, t: float) -> float:
        return self.T_m if t >= self.t_load else 0.0


@dataclass(frozen=True)
class SimSpec:
    """Integration, noise and output-sampling settings."""

    dt: float = 50e-6
    t_end: float = 6.0
    seed: int = 1
    sigma_v: float = 3.76
    sigma_i: float = 0.1
    f_sample: float = 100.0

    def __post_init__(self):
        if self.dt <= 0.0 or self.t_end <= 0.0:
            raise ValueError("dt and t_end must be positive")
        if self.sigma_v < 0.0 or self.sigma_i < 0.0:
            raise ValueError("noise levels must be non-negative")
        if self.f_sample <= 0.0:
            raise ValueError("f_sample must be positive")
        decim = 1.0 / (self.f_sample * self.dt)
        if abs(decim - round(decim)) > 1e-9 * decim:
            raise ValueError(
                f"f_sample={self.f_sample} Hz must divide the step rate "
                f"1/dt={1.0 / self.dt:.6g} Hz evenly"
            )

    @property
    def decimation(self) -> int:
        return round(1.0 / (self.f_sample * self.dt))


@dataclass(frozen=True)
class Scenario:
    """Everything needed to reproduce one simulation experiment."""

    motor: MotorParams
    source: SourceSpec = field(default_factory=SourceSpec)
    load: LoadSpec = field(default_factory=LoadSpec)
    fault: FaultSpec = field(default_factory=FaultSpec)
    sim: SimSpec = field(default_factory=SimSpec)

    def __post_init__(self):
        # The step must resolve the electrical transients.
        limit = 1.0 / (200.0 * self.source.f)
        if self.sim.dt > limit:
            raise ValueError(
                f"dt={self.sim.dt} s too coarse, need <= {limit:.3g} s "
                f"for f={self.source.f} Hz"
            )


@dataclass
class SimRecord:
    """Sampled waveforms plus noise-free internal ground truth."""

    t: np.ndarray
    va: np.ndarray
    vb: np.ndarray
    vc: np.ndarray
    ia: np.ndarray
    ib: np.ndarray
    ic: np.ndarray
    Tm: np.ndarray
    wm: np.ndarray
    gt_lam_qs: np.ndarray
    gt_lam_ds: np.ndarray
    gt_lam_qr: np.ndarray
    gt_lam_dr: np.ndarray
    gt_Te: np.ndarray
    f_sample: float

    def __len__(self):
        return len(self.t)

    def measurement_matrix(self) -> np.ndarray:
        """Channels in the documented CSV column order (n, 9)."""
        return np.column_stack(
            (self.t, self.va, self.vb, self.vc,
             self.ia, self.ib, self.ic, self.Tm, self.wm)
        )


@dataclass
class DqSeries:
    """Synchronous-frame measurement series consumed by the estimator."""

    t: np.ndarray
    v_q: np.ndarray
    v_d: np.ndarray
    v_z: np.ndarray
    i_q: np.ndarray
    i_d: np.ndarray
    i_z: np.ndarray
    T_m: np.ndarray
    omega_m: np.ndarray
    omega: float  # synchronous electrical speed of the frame

    def __len__(self):
        return len(self.t)

    def restrict(self, t_min: float = None, t_max: float = None) -> "DqSeries":
        """Sub-series with t_min <= t <= t_max (inclusive, half-sample slack)."""
        mask = np.ones(len(self.t), dtype=bool)
        if t_min is not None:
            mask &= self.t >= t_min - 1e-9
        if t_max is not None:
            mask &= self.t <= t_max + 1e-9
        return DqSeries(
            t=self.t[mask], v_q=self.v_q[mask], v_d=self.v_d[mask],
            v_z=self.v_z[mask], i_q=self.i_q[mask], i_d=self.i_d[mask],
            i_z=self.i_z[mask], T_m=self.T_m[mask],
            omega_m=self.omega_m[mask], omega=self.omega,
        )


def fault_conductance(fs: FaultSpec, t: float) -> np.ndarray:
    """3x3 Norton conductance matrix of the fault block at time ``t``.

    Each faulted phase connects through R_f to a common star node; grounded
    fault kinds tie the star node to ground through R_g.  The star node is
    eliminated algebraically.  Zero matrix outside [t_on, t_off) or for
    kind ``none``.
    """
    g = np.zeros((3, 3))
    if fs.kind is FaultKind.NONE or not (fs.t_on <= t < fs.t_off):
        return g
    idx = [_PHASE_INDEX[p] for p in fs.phases]
    gf = 1.0 / fs.R_f
    k = len(idx)
    if fs.kind in _GROUNDED and fs.R_g == 0.0:
        # Solidly grounded star point: phases decouple.
        for i in idx:
            g[i, i] = gf
        return g
    gg = 1.0 / fs.R_g if fs.kind in _GROUNDED else 0.0
    denom = k * gf + gg
    for i in idx:
        for jj in idx:
            g[i, jj] = -gf * gf / denom
        g[i, i] += gf
    return g


def terminal_solve(
    e_abc, i_motor_abc, g_fault: np.ndarray, r_src: float
) -> np.ndarray:
    """Terminal voltages from KCL at the machine bus.

    Solves ``(I/R_src + G_f) v = e/R_src - i_motor`` with the motor treated
    as a state-determined current sink.
    """
    e = np.asarray(e_abc, dtype=float)
    i_m = np.asarray(i_motor_abc, dtype=float)
    a = np.eye(3) / r_src + g_fault
    try:
        return np.linalg.solve(a, e / r_src - i_m)
    except np.linalg.LinAlgError as exc:  # unreachable for r_src > 0
        raise SimulationError(f"singular terminal network: {exc}") from exc


def trapezoidal_step(f, x_prev, u_prev, u_next, dt: float,
                     tol: float = 1e-10, max_inner: int = 50):
    """One implicit trapezoidal step ``x(t) = x(t-dt) + dt/2 (f_prev + f)``.

    ``u_next`` may be the input vector at the new time, or a callable of the
    current state iterate for inputs that depend algebraically on the state
    (the terminal network).  The implicit equation is solved by fixed-point
    iteration to ``tol`` relative.
    """
    x0 = np.asarray(x_prev, dtype=float)
    f_prev = np.asarray(f(x0, u_prev), dtype=float)
    x = x0 + dt * f_prev  # explicit predictor
    for _ in range(max_inner):
        u = u_next(x) if callable(u_next) else u_next
        x_new = x0 + 0.5 * dt * (f_prev + np.asarray(f(x, u), dtype=float))
        gap = float(np.max(np.abs(x_new - x)))
        if gap <= tol * (1.0 + float(np.max(np.abs(x_new)))):
            return x_new
        x = x_new
    raise SimulationError(
        f"trapezoidal corrector did not converge in {max_inner} iterations "
        f"(dt={dt}, last gap={gap:.3e})"
    )


def run_scenario(sc: Scenario) -> SimRecord:
    """Integrate the scenario timeline and return the sampled record.

    Starts from a de-energized machine (zero fluxes, standstill), applies
    the load torque at ``t_load`` and the fault block on ``[t_on, t_off)``,
    adds zero-mean Gaussian noise to the voltage and current channels, and
    decimates to ``f_sample``.
    """
    p = sc.motor
    frame = sc.source.frame()
    dt = sc.sim.dt
    n_steps = round(sc.sim.t_end / dt)
    if abs(n_steps * dt - sc.sim.t_end) > 1e-9:
        raise ValueError("t_end must be an integer number of steps")

    rs, rr = p.Rs, p.Rr
    ls, lr, lm, det = p.Ls, p.Lr, p.Lm, p.det
    pp, jin, fv = p.pole_pairs, p.inertia, p.friction
    w_e = frame.omega
    r_src = sc.source.R_src
    v_pk = sc.source.V_ll * math.sqrt(2.0 / 3.0)
    tq_c = 1.5 * pp * lm / det
    theta0 = frame.theta0

    # The fault matrix only changes at t_on/t_off; cache both network solves.
    g_on = fault_conductance(
        sc.fault, sc.fault.t_on, ) if sc.fault.kind is not FaultKind.NONE else np.zeros((3, 3))
    a_inv_on = np.linalg.inv(np.eye(3) / r_src + g_on)

    def deriv(x, u):
        lqs, lds, lqr, ldr, wm = x
        vq, vd, tm = u
        iqs = (lr * lqs - lm * lqr) / det
        ids = (lr * lds - lm * ldr) / det
        iqr = (ls * lqr - lm * lqs) / det
        idr = (ls * ldr - lm * lds) / det
        te = tq_c * (lqs * ldr - lqr * lds)
        slip = w_e - pp * wm
        return np.array((
            vq - w_e * lds - rs * iqs,
            vd + w_e * lqs - rs * ids,
            -slip * ldr - rr * iqr,
            +slip * lqr - rr * idr,
            (te - fv * wm - tm) / jin,
        ))

    def terminal_state(t, x, fault_active):
        """Terminal voltages, source currents and dq inputs for state x."""
        th = w_e * t + theta0
        c0, c1, c2 = math.cos(th), math.cos(th - ALPHA), math.cos(th + ALPHA)
        s0, s1, s2 = math.sin(th), math.sin(th - ALPHA), math.sin(th + ALPHA)
        ea, eb, ec = v_pk * c0, v_pk * c1, v_pk * c2
        lqs, lds, lqr, ldr = x[0], x[1], x[2], x[3]
        iqs = (lr * lqs - lm * lqr) / det
        ids = (lr * lds - lm * ldr) / det
        i_a = c0 * iqs + s0 * ids
        i_b = c1 * iqs + s1 * ids
        i_c = c2 * iqs + s2 * ids
        if fault_active:
            b0 = ea / r_src - i_a
            b1 = eb / r_src - i_b
            b2 = ec / r_src - i_c
            m = a_inv_on
            va = m[0, 0] * b0 + m[0, 1] * b1 + m[0, 2] * b2
            vb = m[1, 0] * b0 + m[1, 1] * b1 + m[1, 2] * b2
            vc = m[2, 0] * b0 + m[2, 1] * b1 + m[2, 2] * b2
        else:
            va = ea - r_src * i_a
            vb = eb - r_src * i_b
            vc = ec - r_src * i_c
        vq = (2.0 / 3.0) * (c0 * va + c1 * vb + c2 * vc)
        vd = (2.0 / 3.0) * (s0 * va + s1 * vb + s2 * vc)
        # Source current includes the fault branch.
        isa = (ea - va) / r_src
        isb = (eb - vb) / r_src
        isc = (ec - vc) / r_src
        return (va, vb, vc), (isa, isb, isc), (vq, vd)

    fault_on = sc.fault.kind is not FaultKind.NONE

    def is_faulted(t):
        return fault_on and sc.fault.t_on <= t < sc.fault.t_off

    n_rec = n_steps + 1
    cols = {name: np.empty(n_rec) for name in (
        "t", "va", "vb", "vc", "ia", "ib", "ic", "Tm", "wm",
        "lqs", "lds", "lqr", "ldr", "Te",
    )}

    def record(k, t, x, v3, i3, tm):
        cols["t"][k] = t
        cols["va"][k], cols["vb"][k], cols["vc"][k] = v3
        cols["ia"][k], cols["ib"][k], cols["ic"][k] = i3
        cols["Tm"][k] = tm
        cols["wm"][k] = x[4]
        cols["lqs"][k], cols["lds"][k] = x[0], x[1]
        cols["lqr"][k], cols["ldr"][k] = x[2], x[3]
        cols["Te"][k] = tq_c * (x[0] * x[3] - x[2] * x[1])

    x = np.zeros(5)
    v3, i3, vdq = terminal_state(0.0, x, is_faulted(0.0))
    tm_now = sc.load.torque_at(0.0)
    u_prev = (vdq[0], vdq[1], tm_now)
    record(0, 0.0, x, v3, i3, tm_now)

    for k in range(1, n_steps + 1):
        t = k * dt
        faulted = is_faulted(t)
        tm_now = sc.load.torque_at(t)

        def u_of(xi, _t=t, _f=faulted, _tm=tm_now):
            _, _, vdq_i = terminal_state(_t, xi, _f)
            return (vdq_i[0], vdq_i[1], _tm)

        try:
            x = trapezoidal_step(deriv, x, u_prev, u_of, dt)
        except SimulationError as exc:
            raise SimulationError(f"step at t={t:.6f} s failed: {exc}") from exc
        v3, i3, vdq = terminal_state(t, x, faulted)
        u_prev = (vdq[0], vdq[1], tm_now)
        record(k, t, x, v3, i3, tm_now)

    # Measurement noise on v/i at the full rate, then plain decimation.
    rng = np.random.default_rng(sc.sim.seed)
    for name, sigma in (("va", sc.sim.sigma_v), ("vb", sc.sim.sigma_v),
                        ("vc", sc.sim.sigma_v), ("ia", sc.sim.sigma_i),
                        ("ib", sc.sim.sigma_i), ("ic", sc.sim.sigma_i)):
        if sigma > 0.0:
            cols[name] = cols[name] + rng.normal(0.0, sigma, n_rec)
        else:
            rng.normal(0.0, 1.0, n_rec)  # keep the stream position fixed

    sel = slice(None, None, sc.sim.decimation)
    return SimRecord(
        t=cols["t"][sel].copy(),
        va=cols["va"][sel].copy(), vb=cols["vb"][sel].copy(),
        vc=cols["vc"][sel].copy(),
        ia=cols["ia"][sel].copy(), ib=cols["ib"][sel].copy(),
        ic=cols["ic"][sel].copy(),
        Tm=cols["Tm"][sel].copy(), wm=cols["wm"][sel].copy(),
        gt_lam_qs=cols["lqs"][sel].copy(), gt_lam_ds=cols["lds"][sel].copy(),
        gt_lam_qr=cols["lqr"][sel].copy(), gt_lam_dr=cols["ldr"][sel].copy(),
        gt_Te=cols["Te"][sel].copy(),
        f_sample=sc.sim.f_sample,
    )


def to_dq_series(rec: SimRecord, frame: FrameAngle) -> DqSeries:
    """Park-transform the voltage and current channels of a record.

    Torque and rotor speed pass through unchanged.
    """
    v = abc_to_dq0(ThreePhaseSample(rec.t, rec.va, rec.vb, rec.vc), frame)
    i = abc_to_dq0(ThreePhaseSample(rec.t, rec.ia, rec.ib, rec.ic), frame)
    return DqSeries(
        t=np.asarray(rec.t, dtype=float),
        v_q=v.q, v_d=v.d, v_z=v.z,
        i_q=i.q, i_d=i.d, i_z=i.z,
        T_m=np.asarray(rec.Tm, dtype=float),
        omega_m=np.asarray(rec.wm, dtype=float),
        omega=frame.omega,
    )
