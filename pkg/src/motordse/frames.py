"""Synchronous rotating-frame (qd0) transforms for three-phase quantities.

Conventions used throughout the package:

* amplitude-invariant scaling (2/3 in front of the projection matrix), so a
  balanced sinusoid of peak ``A`` maps onto a constant vector with
  ``sqrt(q**2 + d**2) == A``;
* the d row carries ``+sin`` entries and the q row ``+cos`` entries;
* the zero-sequence output equals the arithmetic mean of the phase values;
* the frame angle is ``theta(t) = omega * t + theta0`` with ``omega`` the
  synchronous electrical speed in rad/s.

All functions accept scalars or equally shaped numpy arrays in the sample
fields and broadcast elementwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Electrical angle between consecutive phases.
ALPHA = 2.0 * math.pi / 3.0

# line-line rms -> phase peak
_LL_TO_PEAK = math.sqrt(2.0) / math.sqrt(3.0)


@dataclass(frozen=True)
class FrameAngle:
    """Rotating-frame angle, shared by the simulator and the estimator."""

    theta0: float = 0.0
    omega: float = 2.0 * math.pi * 60.0

    @classmethod
    def from_frequency(cls, f_hz: float, theta0: float = 0.0) -> "FrameAngle":
        return cls(theta0=theta0, omega=2.0 * math.pi * f_hz)

    def angle(self, t):
        """theta(t) in electrical radians."""
        return self.omega * np.asarray(t, dtype=float) + self.theta0


@dataclass(frozen=True)
class ThreePhaseSample:
    """Instantaneous per-phase values (volts or amperes) at time ``t``."""

    t: object
    a: object
    b: object
    c: object


@dataclass(frozen=True)
class DqzSample:
    """q-axis, d-axis and zero-sequence values at time ``t``."""

    t: object
    q: object
    d: object
    z: object


def abc_to_dq0(s: ThreePhaseSample, frame: FrameAngle) -> DqzSample:
    """Project phase quantities onto the rotating qd0 frame."""
    th = frame.angle(s.t)
    a = np.asarray(s.a, dtype=float)
    b = np.asarray(s.b, dtype=float)
    c = np.asarray(s.c, dtype=float)
    q = (2.0 / 3.0) * (np.cos(th) * a + np.cos(th - ALPHA) * b + np.cos(th + ALPHA) * c)
    d = (2.0 / 3.0) * (np.sin(th) * a + np.sin(th - ALPHA) * b + np.sin(th + ALPHA) * c)
    z = (a + b + c) / 3.0
    return DqzSample(t=s.t, q=q, d=d, z=z)


def dq0_to_abc(s: DqzSample, frame: FrameAngle) -> ThreePhaseSample:
    """Exact inverse of :func:`abc_to_dq0` (closed-form inverse matrix)."""
    th = frame.angle(s.t)
    q = np.asarray(s.q, dtype=float)
    d = np.asarray(s.d, dtype=float)
    z = np.asarray(s.z, dtype=float)
    a = np.cos(th) * q + np.sin(th) * d + z
    b = np.cos(th - ALPHA) * q + np.sin(th - ALPHA) * d + z
    c = np.cos(th + ALPHA) * q + np.sin(th + ALPHA) * d + z
    return ThreePhaseSample(t=s.t, a=a, b=b, c=c)


def balanced_source(v_ll: float, frame: FrameAngle, t) -> ThreePhaseSample:
    """Ideal balanced three-phase source, phase b lagging a by ``ALPHA``.

    ``v_ll`` is the line-line rms voltage; the returned waveforms have peak
    ``v_ll * sqrt(2/3)``.  Its qd0 image is the constant ``(v_pk, 0, 0)``.
    """
    v_pk = v_ll * _LL_TO_PEAK
    th = frame.angle(t)
    return ThreePhaseSample(
        t=t,
        a=v_pk * np.cos(th),
        b=v_pk * np.cos(th - ALPHA),
        c=v_pk * np.cos(th + ALPHA),
    )
