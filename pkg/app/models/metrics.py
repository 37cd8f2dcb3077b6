"""Gait metrics and experiment report models."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

CURVE_CHANNELS: tuple[str, ...] = ("grf_x", "grf_y", "delta_y_com", "leg_angle", "ankle_moment")


@dataclass(frozen=True)
class CycleCurves:
    """Percent-of-cycle curves of one stride; GRFs are normalised by body weight."""

    percent: np.ndarray
    grf_x: np.ndarray
    grf_y: np.ndarray
    delta_y_com: np.ndarray
    leg_angle: np.ndarray
    ankle_moment: np.ndarray

    def channel(self, name: str) -> np.ndarray:
        return getattr(self, name)

    def as_dict(self) -> Dict[str, np.ndarray]:
        return {"percent": self.percent, **{c: self.channel(c) for c in CURVE_CHANNELS}}


class CycleMetrics(BaseModel):
    """Derived quantities of one touchdown-to-touchdown stride of the reference leg."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    index: int
    leg: str
    t_start: float
    t_end: float
    transient: bool = False
    curves: CycleCurves = Field(exclude=True)
    heel_off_pct: Optional[float] = None
    opposite_touchdown_pct: Optional[float] = None
    toe_off_pct: Optional[float] = None
    average_speed: float
    peak_count: int
    peak_ratio: Optional[float] = None
    grf_x_neg_to_pos: bool = False
    mean_grf_y_total: float = Field(description="Time-mean of both legs' vertical GRF over m·g")
    mean_grf_x_total: float = Field(description="Time-mean of both legs' horizontal GRF over m·g")

    @property
    def duration(self) -> float:
        return self.t_end - self.t_start

    @property
    def stance_fraction(self) -> Optional[float]:
        return None if self.toe_off_pct is None else self.toe_off_pct / 100.0

    @property
    def m_shaped(self) -> bool:
        return self.peak_count == 2

    @property
    def asymmetry(self) -> Optional[float]:
        return None if self.peak_ratio is None else abs(self.peak_ratio - 1.0)


class GaitSummary(BaseModel):
    """Averages over the converged strides of a run."""

    model_config = ConfigDict(frozen=True)

    strides: int
    converged_strides: int
    mean_speed: Optional[float] = None
    peak_ratio: Optional[float] = None
    asymmetry: Optional[float] = None
    heel_off_pct: Optional[float] = None
    opposite_touchdown_pct: Optional[float] = None
    toe_off_pct: Optional[float] = None
    stance_fraction: Optional[float] = None
    m_shaped_fraction: Optional[float] = None
    mean_grf_y_total: Optional[float] = None
    fell: bool = False
    fall_time: Optional[float] = None
    fall_reason: Optional[str] = None


class EnergyBalance(BaseModel):
    """Mechanical energy change against integrated leg power over one stride (J)."""

    model_config = ConfigDict(frozen=True)

    t_start: float
    t_end: float
    energy_change: float
    work: float
    gross_work: float

    @property
    def relative_error(self) -> float:
        scale = self.gross_work if self.gross_work > 0 else 1.0
        return abs(self.energy_change - self.work) / scale


class ReturnMapResult(BaseModel):
    """Fixed point of the stride map and its linearisation."""

    model_config = ConfigDict(frozen=True)

    coordinates: List[str]
    fixed_point: List[float]
    residual: float
    iterations: int
    history: List[float] = Field(default_factory=list)
    sections: List[List[float]] = Field(default_factory=list)
    jacobian: List[List[float]] = Field(default_factory=list)
    eigenvalue_moduli: List[float] = Field(default_factory=list)
    spectral_radius: Optional[float] = None

    @property
    def stable(self) -> bool:
        return self.spectral_radius is not None and self.spectral_radius < 1.0


class OffsetOutcome(BaseModel):
    """Behaviour after switching to one fixed foot-placement offset."""

    model_config = ConfigDict(frozen=True)

    offset: float
    fell: bool
    fall_time: Optional[float] = None
    fall_reason: Optional[str] = None
    strides_after_switch: int = 0
    steady_speed: Optional[float] = None
    speed_change_pct: Optional[float] = None
    converged: bool = False
    strides_to_converge: Optional[int] = None


class AnkleStabilizationReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    t_switch: float
    t_end: float
    pre_switch_speed: Optional[float] = None
    pre_switch_offset: Optional[float] = None
    outcomes: List[OffsetOutcome] = Field(default_factory=list)
    traces: Dict[str, Any] = Field(default_factory=dict, exclude=True)

    @property
    def all_walking(self) -> bool:
        return all(not o.fell for o in self.outcomes)


class VariantResult(BaseModel):
    """One model variant of the point-foot comparison."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    variant: str
    summary: GaitSummary
    representative: Optional[CycleMetrics] = None

    @property
    def fell(self) -> bool:
        return self.summary.fell


class PointFootComparison(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    ankle: VariantResult
    point_foot: VariantResult
    traces: Dict[str, Any] = Field(default_factory=dict, exclude=True)

    @property
    def partial(self) -> bool:
        return self.ankle.fell or self.point_foot.fell


class PerturbationOutcome(BaseModel):
    model_config = ConfigDict(frozen=True)

    controller: str
    delta_vx: float
    t_inject: float
    fell: bool
    fall_time: Optional[float] = None
    max_deviation: float = 0.0
    recovered: bool = False
    strides_to_recovery: Optional[int] = None


class PerturbationReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    delta_vx: float
    t_inject: float
    outcomes: List[PerturbationOutcome] = Field(default_factory=list)
    traces: Dict[str, Any] = Field(default_factory=dict, exclude=True)


class SweepRow(BaseModel):
    """Steady-gait summary of one case of a sweep."""

    model_config = ConfigDict(frozen=True)

    case_id: Optional[int]
    label: str
    summary: GaitSummary


class SweepReport(BaseModel):
    rows: List[SweepRow] = Field(default_factory=list)

    def by_case(self, case_id: int) -> Optional[SweepRow]:
        return next((row for row in self.rows if row.case_id == case_id), None)
