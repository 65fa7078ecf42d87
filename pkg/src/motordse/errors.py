"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid or unknown configuration content."""


class CsvFormatError(ValueError):
    """Measurement CSV does not match the documented schema."""


class SimulationError(RuntimeError):
    """Numerical failure inside the time-domain simulator."""


class EstimationError(RuntimeError):
    """Numerical failure inside the state estimator."""
