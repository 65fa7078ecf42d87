"""Scikit-learn compatible wrappers around the transform and the detector.

``ParkTransformer`` maps sampled abc records to the synchronous frame and
back; ``InductionMotorFaultDetector`` scores sliding windows of a record
with the model-consistency test.  Both follow the estimator protocol
(``get_params``/``set_params``, ``fit`` returning ``self``) so they compose
with pipelines and model-selection tooling.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .estimation import DseConfig, sliding_detection
from .frames import DqzSample, FrameAngle, ThreePhaseSample, abc_to_dq0, dq0_to_abc
from .motor import MotorParams
from .simulate import DqSeries
from .validation import DQ_COLUMNS, RECORD_COLUMNS, check_record_array


class ParkTransformer(BaseEstimator, TransformerMixin):
    """Rotate sampled three-phase records into the synchronous qd0 frame.

    Parameters
    ----------
    frequency : float
        Synchronous frequency of the rotating frame in Hz.
    theta0 : float
        Frame angle at t = 0 in electrical radians.

    ``transform`` expects an ``(n, 9)`` array with columns
    ``t,va,vb,vc,ia,ib,ic,Tm,wm`` and returns the same layout with the
    voltage and current triples replaced by their qd0 images
    (``t,vq,vd,vz,iq,id,iz,Tm,wm``).  ``inverse_transform`` undoes it.
    """

    def __init__(self, frequency: float = 60.0, theta0: float = 0.0):
        self.frequency = frequency
        self.theta0 = theta0

    def _frame(self) -> FrameAngle:
        if self.frequency <= 0.0:
            raise ValueError("frequency must be positive")
        return FrameAngle.from_frequency(self.frequency, self.theta0)

    def fit(self, X=None, y=None):
        self._frame()
        return self

    def transform(self, X) -> np.ndarray:
        arr = check_record_array(X, RECORD_COLUMNS)
        frame = self._frame()
        t = arr[:, 0]
        v = abc_to_dq0(ThreePhaseSample(t, arr[:, 1], arr[:, 2], arr[:, 3]), frame)
        i = abc_to_dq0(ThreePhaseSample(t, arr[:, 4], arr[:, 5], arr[:, 6]), frame)
        return np.column_stack(
            (t, v.q, v.d, v.z, i.q, i.d, i.z, arr[:, 7], arr[:, 8])
        )

    def inverse_transform(self, X) -> np.ndarray:
        arr = check_record_array(X, DQ_COLUMNS)
        frame = self._frame()
        t = arr[:, 0]
        v = dq0_to_abc(DqzSample(t, arr[:, 1], arr[:, 2], arr[:, 3]), frame)
        i = dq0_to_abc(DqzSample(t, arr[:, 4], arr[:, 5], arr[:, 6]), frame)
        return np.column_stack(
            (t, v.a, v.b, v.c, i.a, i.b, i.c, arr[:, 7], arr[:, 8])
        )


class InductionMotorFaultDetector(BaseEstimator):
    """Model-consistency fault detector over sliding measurement windows.

    The detector fits the machine's discretized dynamics to each window of
    an input record and converts the weighted residual cost into a
    chi-squared CDF value; windows whose value reaches ``p_threshold`` are
    labelled faulted.  Nothing is learned from data: ``fit`` validates the
    configuration and freezes derived settings.

    Parameters mirror :class:`motordse.estimation.DseConfig` plus the
    machine parameters and frame definition.  ``input_frame`` selects
    whether ``X`` carries raw abc channels (default) or an already
    transformed qd0 record.

    ``predict`` returns +1 for healthy windows and -1 for faulted ones
    (outlier-detector convention); ``score_samples`` returns ``-p`` so that
    larger means more normal, and ``decision_function`` is positive for
    healthy windows.
    """

    def __init__(
        self,
        motor: MotorParams = None,
        frequency: float = 60.0,
        theta0: float = 0.0,
        window: int = 5,
        stride: int = 1,
        tol_dj: float = 1e-6,
        max_iter: int = 50,
        sigma_init: float = 0.01,
        seed: int = 7,
        sigma_voltage: float = 10.0,
        sigma_current: float = 0.3,
        sigma_flux: float = 0.08,
        sigma_torque: float = 12.0,
        sigma_speed: float = 10.0,
        p_threshold: float = 0.95,
        include_speed_residual: bool = True,
        input_frame: str = "abc",
    ):
        self.motor = motor
        self.frequency = frequency
        self.theta0 = theta0
        self.window = window
        self.stride = stride
        self.tol_dj = tol_dj
        self.max_iter = max_iter
        self.sigma_init = sigma_init
        self.seed = seed
        self.sigma_voltage = sigma_voltage
        self.sigma_current = sigma_current
        self.sigma_flux = sigma_flux
        self.sigma_torque = sigma_torque
        self.sigma_speed = sigma_speed
        self.p_threshold = p_threshold
        self.include_speed_residual = include_speed_residual
        self.input_frame = input_frame

    def fit(self, X=None, y=None):
        """Validate parameters and freeze the estimator configuration."""
        if self.input_frame not in ("abc", "dq"):
            raise ValueError("input_frame must be 'abc' or 'dq'")
        if self.motor is None:
            from .config import DEFAULT_MOTOR

            self.motor_ = DEFAULT_MOTOR
        else:
            self.motor_ = self.motor
        self.config_ = DseConfig(
            window=self.window,
            stride=self.stride,
            tol_dj=self.tol_dj,
            max_iter=self.max_iter,
            sigma_init=self.sigma_init,
            seed=self.seed,
            sigma_voltage=self.sigma_voltage,
            sigma_current=self.sigma_current,
            sigma_flux=self.sigma_flux,
            sigma_torque=self.sigma_torque,
            sigma_speed=self.sigma_speed,
            p_threshold=self.p_threshold,
            include_speed_residual=self.include_speed_residual,
        )
        self.frame_ = FrameAngle.from_frequency(self.frequency, self.theta0)
        return self

    def _check_fitted(self):
        if not hasattr(self, "config_"):
            raise NotFittedError(
                "this detector is not fitted yet; call fit() first"
            )

    def _series(self, X) -> DqSeries:
        if self.input_frame == "abc":
            arr = ParkTransformer(self.frequency, self.theta0).transform(X)
        else:
            arr = check_record_array(X, DQ_COLUMNS)
        return DqSeries(
            t=arr[:, 0],
            v_q=arr[:, 1], v_d=arr[:, 2], v_z=arr[:, 3],
            i_q=arr[:, 4], i_d=arr[:, 5], i_z=arr[:, 6],
            T_m=arr[:, 7], omega_m=arr[:, 8],
            omega=self.frame_.omega,
        )

    def detect(self, X) -> list:
        """Full per-window estimation results for a record."""
        self._check_fitted()
        return sliding_detection(self._series(X), self.motor_, self.config_)

    def score_samples(self, X) -> np.ndarray:
        """Per-window ``-p``; larger values mean more model-consistent."""
        return np.array([-res.p for res in self.detect(X)])

    def decision_function(self, X) -> np.ndarray:
        """Positive for healthy windows, negative at/above the threshold."""
        return self.score_samples(X) + self.p_threshold

    def predict(self, X) -> np.ndarray:
        """+1 for healthy windows, -1 for faulted ones."""
        scores = self.decision_function(X)
        return np.where(scores > 0.0, 1, -1)
