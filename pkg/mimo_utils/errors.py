class SimulationError(Exception):
    """Base class for every error raised by the simulator."""


class DomainError(SimulationError, ValueError):
    """An argument lies outside the domain of a model function."""


class ShapeError(SimulationError, ValueError):
    """Matrix or vector dimensions do not conform."""


class DegeneratePilotError(SimulationError, ValueError):
    """The pilot makes tau + delta vanish, so the estimator scale is undefined."""


class ConfigError(SimulationError, ValueError):
    """Invalid scenario configuration (file, flags or SimConfig fields)."""


class InconsistencyError(SimulationError, RuntimeError):
    """A closed-form identity failed; this points at a bug, not at the data."""
