"""Fifth-order induction machine model in the synchronous qd frame.

State variables are the four winding flux linkages (V*s) plus the mechanical
rotor speed.  The rotor circuit is short-circuited (squirrel cage), rotor
quantities are referred to the stator, and ``omega_r = pole_pairs * omega_m``
is the electrical rotor speed.

Torque convention: SI flux linkages with

    T_e = 1.5 * pole_pairs * (lam_ds * i_qs - lam_qs * i_ds)
        = 1.5 * pole_pairs * (Lm / det) * (lam_qs * lam_dr - lam_qr * lam_ds)

which yields N*m directly and pairs with ``d(omega_m)/dt = (T_e - F*omega_m
- T_m) / J``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# Inductance-matrix determinants below this are treated as non-physical.
DET_TOLERANCE = 1e-12


@dataclass(frozen=True)
class MotorParams:
    """Electrical and mechanical machine constants.

    Rs, Rr          stator / rotor resistance [ohm]
    Lls, Llr        stator / rotor leakage inductance [H]
    Lm              magnetizing inductance [H]
    pole_pairs      number of pole pairs
    inertia         combined rotor+load inertia [kg*m^2]
    friction        viscous friction coefficient [N*m*s]
    f_nom           nominal supply frequency [Hz]
    V_ll            nominal line-line rms voltage [V]
    """

    Rs: float
    Lls: float
    Rr: float
    Llr: float
    Lm: float
    pole_pairs: int
    inertia: float
    friction: float
    f_nom: float = 60.0
    V_ll: float = 460.0

    def __post_init__(self):
        for name in ("Rs", "Lls", "Rr", "Llr", "Lm", "inertia", "f_nom", "V_ll"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be strictly positive")
        if self.friction < 0.0:
            raise ValueError("friction must be non-negative")
        if int(self.pole_pairs) != self.pole_pairs or self.pole_pairs < 1:
            raise ValueError("pole_pairs must be a positive integer")
        if self.det <= DET_TOLERANCE:
            raise ValueError(
                f"degenerate inductances: Ls*Lr - Lm^2 = {self.det:.3e} H^2"
            )

    @property
    def Ls(self) -> float:
        return self.Lls + self.Lm

    @property
    def Lr(self) -> float:
        return self.Llr + self.Lm

    @property
    def det(self) -> float:
        """Determinant of the per-axis inductance matrix, Ls*Lr - Lm^2."""
        return self.Ls * self.Lr - self.Lm * self.Lm


@dataclass(frozen=True)
class ElectricalState:
    """Stator and (stator-referred) rotor flux linkages [V*s]."""

    lam_qs: float
    lam_ds: float
    lam_qr: float
    lam_dr: float


@dataclass(frozen=True)
class MechanicalState:
    """Rotor shaft speed [mechanical rad/s]."""

    omega_m: float

    def omega_r(self, p: MotorParams) -> float:
        """Electrical rotor speed, pole_pairs * omega_m."""
        return p.pole_pairs * self.omega_m


@dataclass(frozen=True)
class DqCurrents:
    """Stator and (stator-referred) rotor currents [A]."""

    i_qs: float
    i_ds: float
    i_qr: float
    i_dr: float


def currents_from_fluxes(p: MotorParams, es: ElectricalState) -> DqCurrents:
    """Invert the per-axis inductance matrix to get winding currents."""
    det = p.det
    if det <= DET_TOLERANCE:
        raise ValueError(f"degenerate inductances: det = {det:.3e} H^2")
    return DqCurrents(
        i_qs=(p.Lr * es.lam_qs - p.Lm * es.lam_qr) / det,
        i_ds=(p.Lr * es.lam_ds - p.Lm * es.lam_dr) / det,
        i_qr=(p.Ls * es.lam_qr - p.Lm * es.lam_qs) / det,
        i_dr=(p.Ls * es.lam_dr - p.Lm * es.lam_ds) / det,
    )


def fluxes_from_currents(p: MotorParams, c: DqCurrents) -> ElectricalState:
    """Flux linkages produced by a given set of winding currents."""
    return ElectricalState(
        lam_qs=p.Ls * c.i_qs + p.Lm * c.i_qr,
        lam_ds=p.Ls * c.i_ds + p.Lm * c.i_dr,
        lam_qr=p.Lr * c.i_qr + p.Lm * c.i_qs,
        lam_dr=p.Lr * c.i_dr + p.Lm * c.i_ds,
    )


def electrical_torque(p: MotorParams, es: ElectricalState) -> float:
    """Electromagnetic torque [N*m] from the flux-linkage state."""
    det = p.det
    return 1.5 * p.pole_pairs * (p.Lm / det) * (
        es.lam_qs * es.lam_dr - es.lam_qr * es.lam_ds
    )


def state_derivative(
    p: MotorParams,
    es: ElectricalState,
    ms: MechanicalState,
    v_qs: float,
    v_ds: float,
    omega: float,
    T_m: float,
):
    """Time derivatives of (lam_qs, lam_ds, lam_qr, lam_dr, omega_m).

    ``omega`` is the synchronous electrical speed of the reference frame;
    rotor terminal voltages are identically zero (squirrel cage).
    """
    c = currents_from_fluxes(p, es)
    te = electrical_torque(p, es)
    slip = omega - ms.omega_r(p)
    return (
        v_qs - omega * es.lam_ds - p.Rs * c.i_qs,
        v_ds + omega * es.lam_qs - p.Rs * c.i_ds,
        -slip * es.lam_dr - p.Rr * c.i_qr,
        +slip * es.lam_qr - p.Rr * c.i_dr,
        (te - p.friction * ms.omega_m - T_m) / p.inertia,
    )


def _circuit_at_slip(p: MotorParams, v_ph: float, omega_e: float, s: float):
    """Stator current phasor and torque of the per-phase equivalent circuit.

    Returns ``(i_stator_rms, torque)`` for slip ``s`` at phase voltage
    ``v_ph`` (rms) and electrical speed ``omega_e``.
    """
    x_ls = omega_e * p.Lls
    x_lr = omega_e * p.Llr
    x_m = omega_e * p.Lm
    z_m = 1j * x_m
    z_r = p.Rr / s + 1j * x_lr
    z_total = p.Rs + 1j * x_ls + (z_m * z_r) / (z_m + z_r)
    i1 = v_ph / z_total
    i2 = i1 * z_m / (z_m + z_r)  # rotor-branch current
    w_sync = omega_e / p.pole_pairs
    torque = 3.0 * abs(i2) ** 2 * (p.Rr / s) / w_sync
    return abs(i1), torque


def steady_state_oracle(p: MotorParams, V_ll: float, f: float, T_m: float):
    """Steady operating point from the per-phase equivalent circuit.

    Finds, by bisection, the slip on the stable branch (below breakdown)
    where electromagnetic torque balances ``T_m`` plus viscous friction.
    Returns ``(slip, i_stator_rms, T_e, omega_m)``.  Raises ``ValueError``
    if the requested torque exceeds the achievable torque (stall).
    """
    if V_ll <= 0.0 or f <= 0.0:
        raise ValueError("V_ll and f must be positive")
    if T_m < 0.0:
        raise ValueError("load torque must be non-negative")
    omega_e = 2.0 * math.pi * f
    w_sync = omega_e / p.pole_pairs
    v_ph = V_ll / math.sqrt(3.0)

    if T_m == 0.0 and p.friction == 0.0:
        # No-load limit: rotor branch open, magnetizing current only.
        i0 = abs(v_ph / (p.Rs + 1j * omega_e * (p.Lls + p.Lm)))
        return 0.0, i0, 0.0, w_sync

    def balance(s: float) -> float:
        _, te = _circuit_at_slip(p, v_ph, omega_e, s)
        return te - T_m - p.friction * w_sync * (1.0 - s)

    # Locate the breakdown slip so bisection stays on the stable branch.
    grid = [10.0 ** e for e in _logspace(-6.0, 0.0, 241)]
    torques = [_circuit_at_slip(p, v_ph, omega_e, s)[1] for s in grid]
    k_peak = max(range(len(grid)), key=lambda k: torques[k])
    s_peak = grid[k_peak]
    if balance(s_peak) < 0.0:
        raise ValueError(
            f"load torque {T_m} N*m exceeds achievable torque "
            f"{torques[k_peak]:.2f} N*m (stall)"
        )

    lo, hi = 1e-12, s_peak
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if balance(mid) < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15:
            break
    slip = 0.5 * (lo + hi)
    i_rms, te = _circuit_at_slip(p, v_ph, omega_e, slip)
    omega_m = (1.0 - slip) * w_sync
    return slip, i_rms, te, omega_m


def _logspace(lo: float, hi: float, n: int):
    step = (hi - lo) / (n - 1)
    return [lo + k * step for k in range(n)]
