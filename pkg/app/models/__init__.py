"""Data models for the walking simulator."""

from .metrics import (
    AnkleStabilizationReport,
    CycleCurves,
    CycleMetrics,
    EnergyBalance,
    GaitSummary,
    OffsetOutcome,
    PerturbationOutcome,
    PerturbationReport,
    PointFootComparison,
    ReturnMapResult,
    SweepReport,
    SweepRow,
    VariantResult,
)
from .params import (
    AnkleSchedule,
    FootPlacementLaw,
    ModelParams,
    SimulationOptions,
    StiffnessSchedule,
    StrideClock,
    SubphaseId,
    nominal_params,
)
from .scenario import ReferenceGait, RunManifest, Scenario
from .state import LegId, LegRole, LegState, PhaseId, WalkerState
from .trace import EventKind, EventRecord, FallMarker, GaitTrace

__all__ = [
    # Parameters
    "ModelParams",
    "StiffnessSchedule",
    "AnkleSchedule",
    "FootPlacementLaw",
    "StrideClock",
    "SubphaseId",
    "SimulationOptions",
    "nominal_params",
    # State and traces
    "PhaseId",
    "LegId",
    "LegRole",
    "LegState",
    "WalkerState",
    "EventKind",
    "EventRecord",
    "FallMarker",
    "GaitTrace",
    # Metrics and reports
    "CycleCurves",
    "CycleMetrics",
    "GaitSummary",
    "EnergyBalance",
    "ReturnMapResult",
    "OffsetOutcome",
    "AnkleStabilizationReport",
    "VariantResult",
    "PointFootComparison",
    "PerturbationOutcome",
    "PerturbationReport",
    "SweepRow",
    "SweepReport",
    # Scenarios
    "Scenario",
    "ReferenceGait",
    "RunManifest",
]
