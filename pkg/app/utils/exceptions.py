"""Custom exceptions for the walking simulator."""

from __future__ import annotations

from typing import TYPE_CHECKING, List, Optional, Sequence

if TYPE_CHECKING:
    from app.models.state import WalkerState


class WalkerError(Exception):
    """Base exception for the walking simulator."""

    pass


class ParameterError(WalkerError):
    """Raised when a numeric parameter is outside its admissible range."""

    pass


class ConfigurationError(WalkerError):
    """Raised when a configuration value (case id, experiment kind) is unknown."""

    pass


class ScenarioError(ConfigurationError):
    """Raised when a scenario file cannot be parsed or fails validation."""

    def __init__(self, message: str, violations: Optional[Sequence[str]] = None):
        self.violations: List[str] = list(violations or [])
        if self.violations:
            message = message + "\n" + "\n".join(f"  - {v}" for v in self.violations)
        super().__init__(message)


class TrajectoryDomainError(WalkerError):
    """Raised when a reference curve is built or evaluated outside its domain."""

    pass


class MechanicsError(WalkerError):
    """Base exception for force-balance failures."""

    pass


class GeometryError(MechanicsError):
    """Raised when leg geometry is degenerate (non-positive leg length)."""

    pass


class SingularityError(MechanicsError):
    """Raised when the push-off torque relation has a vanishing denominator."""

    pass


class SimulationError(WalkerError):
    """Raised when the hybrid integration cannot continue."""

    def __init__(self, message: str, last_state: Optional["WalkerState"] = None):
        super().__init__(message)
        self.last_state = last_state


class StepSizeUnderflowError(SimulationError):
    """Raised when the adaptive step size collapses."""

    pass


class EventLocalizationError(SimulationError):
    """Raised when an event bracket does not contain a sign change."""

    pass


class TransitionError(SimulationError):
    """Raised when an event fires in a phase that has no edge for it."""

    pass


class AnalysisError(WalkerError):
    """Raised when a trace cannot be analysed or an iteration does not converge."""

    def __init__(self, message: str, history: Optional[Sequence[float]] = None):
        super().__init__(message)
        self.history: List[float] = list(history or [])
