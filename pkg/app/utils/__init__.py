"""Utility functions and helpers."""

from .formatters import format_fall, format_percent, format_ratio, format_speed
from .validators import parse_fraction_of, validate_params
from .exceptions import (
    AnalysisError,
    ConfigurationError,
    MechanicsError,
    ParameterError,
    ScenarioError,
    SimulationError,
    TrajectoryDomainError,
    WalkerError,
)

__all__ = [
    "format_fall",
    "format_percent",
    "format_ratio",
    "format_speed",
    "parse_fraction_of",
    "validate_params",
    "WalkerError",
    "ParameterError",
    "ConfigurationError",
    "ScenarioError",
    "TrajectoryDomainError",
    "MechanicsError",
    "SimulationError",
    "AnalysisError",
]
