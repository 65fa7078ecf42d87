"""Induction-motor fault simulation and settingless fault detection.

The package pairs a dynamic qd-frame induction machine simulator (terminal
faults behind a resistive source) with a windowed dynamic state estimator
that flags faults through a chi-squared model-consistency test.
"""

__version__ = "0.1.0"

from .chi2 import chi_squared_cdf
from .detector import InductionMotorFaultDetector, ParkTransformer
from .errors import ConfigError, CsvFormatError, EstimationError, SimulationError
from .estimation import (
    DseConfig,
    EstimationResult,
    ObservationWindow,
    build_residual,
    gauss_newton_solve,
    numerical_jacobian,
    residual_dof,
    sliding_detection,
)
from .frames import (
    ALPHA,
    DqzSample,
    FrameAngle,
    ThreePhaseSample,
    abc_to_dq0,
    balanced_source,
    dq0_to_abc,
)
from .config import DEFAULT_MOTOR, DseSettings, RunConfig, dump_config, load_config
from .motor import (
    DqCurrents,
    ElectricalState,
    MechanicalState,
    MotorParams,
    currents_from_fluxes,
    electrical_torque,
    fluxes_from_currents,
    state_derivative,
    steady_state_oracle,
)
from .simulate import (
    DqSeries,
    FaultKind,
    FaultSpec,
    LoadSpec,
    Scenario,
    SimRecord,
    SimSpec,
    SourceSpec,
    fault_conductance,
    run_scenario,
    terminal_solve,
    to_dq_series,
    trapezoidal_step,
)

__all__ = [
    "ALPHA",
    "ConfigError",
    "CsvFormatError",
    "DEFAULT_MOTOR",
    "DqCurrents",
    "DqSeries",
    "DqzSample",
    "DseConfig",
    "DseSettings",
    "ElectricalState",
    "EstimationError",
    "EstimationResult",
    "FaultKind",
    "FaultSpec",
    "FrameAngle",
    "InductionMotorFaultDetector",
    "LoadSpec",
    "MechanicalState",
    "MotorParams",
    "ObservationWindow",
    "ParkTransformer",
    "RunConfig",
    "Scenario",
    "SimRecord",
    "SimSpec",
    "SimulationError",
    "SourceSpec",
    "ThreePhaseSample",
    "abc_to_dq0",
    "balanced_source",
    "build_residual",
    "chi_squared_cdf",
    "currents_from_fluxes",
    "dq0_to_abc",
    "dump_config",
    "electrical_torque",
    "fault_conductance",
    "fluxes_from_currents",
    "gauss_newton_solve",
    "load_config",
    "numerical_jacobian",
    "residual_dof",
    "run_scenario",
    "sliding_detection",
    "state_derivative",
    "steady_state_oracle",
    "terminal_solve",
    "to_dq_series",
    "trapezoidal_step",
]
