"""Exception and warning types shared across the simulator."""


class SimulationError(Exception):
    """Base class for all simulator errors."""


class DegenerateSystem(SimulationError):
    """Raised when delta_z = delta_x = 0 and the mixing angle is undefined."""


class StepUnderflow(SimulationError):
    """Raised when the integrator would need a pathologically small step."""


class PreconditionViolated(SimulationError):
    """Raised when an operation is called outside its validity regime."""


class NoPeakFound(SimulationError):
    """Raised when a resonance search sees an essentially flat contrast."""


class NotNearResonance(SimulationError):
    """Raised when a Raman Rabi frequency is requested far from resonance."""


class FilterBandsOverlap(SimulationError):
    """Raised when slow and fast components are too close to separate."""


class ParseError(SimulationError):
    """Raised for malformed scenario configuration text."""


class ValidationError(SimulationError):
    """Raised for well-formed but invalid scenario configuration."""


class WeakDriveWarning(UserWarning):
    """Drive amplitude is outside the weak-drive regime (A >= omega0)."""


class DegenerateModesWarning(UserWarning):
    """Floquet eigenphases coincide; quasienergies are only defined jointly."""
