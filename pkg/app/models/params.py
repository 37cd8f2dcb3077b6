"""Model parameter types and the stiffness schedules of the three simulated cases."""

from __future__ import annotations

import math
from enum import Enum
from typing import Any, Dict, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.config import Settings
from app.utils.exceptions import ConfigurationError
from app.utils.validators import parse_fraction_of


class SubphaseId(str, Enum):
    """Stance subphase selecting the active leg and ankle gains."""

    TD = "TD"
    SS = "SS"
    PO = "PO"


class StiffnessSchedule(BaseModel):
    """Leg stiffness (N/m) and damping ratio per stance subphase."""

    model_config = ConfigDict(frozen=True)

    k_td: float = 14000.0
    k_ss: float = 14000.0
    k_po: float = 14000.0
    zeta_td: float = 0.01
    zeta_ss: float = 0.08
    zeta_po: float = 0.1

    def stiffness(self, subphase: SubphaseId) -> float:
        return {SubphaseId.TD: self.k_td, SubphaseId.SS: self.k_ss, SubphaseId.PO: self.k_po}[
            subphase
        ]

    def damping_ratio(self, subphase: SubphaseId) -> float:
        return {
            SubphaseId.TD: self.zeta_td,
            SubphaseId.SS: self.zeta_ss,
            SubphaseId.PO: self.zeta_po,
        }[subphase]


class AnkleSchedule(BaseModel):
    """Flat-foot ankle quasi-stiffness (N·m/rad); push-off is feed-forward."""

    model_config = ConfigDict(frozen=True)

    ka_td: float = 200.0
    ka_ss: float = 400.0

    def stiffness(self, subphase: SubphaseId) -> float:
        if subphase is SubphaseId.TD:
            return self.ka_td
        if subphase is SubphaseId.SS:
            return self.ka_ss
        return 0.0


class FootPlacementLaw(BaseModel):
    """Affine velocity-based foot placement with an optional fixed override.

    The target is the horizontal heel position relative to the mass at touchdown.
    """

    model_config = ConfigDict(frozen=True)

    c0: float = Field(default=0.06, description="Nominal offset (m)")
    c1: float = Field(default=0.2, description="Velocity gain (s)")
    c2: float = Field(default=0.0, description="Velocity-error gain (s)")
    v_ref: float = Field(default=1.2, description="Reference speed (m/s)")
    override: Optional[float] = Field(default=None, description="Fixed target (m)")


class StrideClock(BaseModel):
    """Free-running stride clock with antiphase leg offsets."""

    model_config = ConfigDict(frozen=True)

    offset_l: float = 0.0
    offset_r: Optional[float] = None

    def offset(self, leg: str, period: float) -> float:
        if leg == "l":
            return self.offset_l
        return self.offset_r if self.offset_r is not None else self.offset_l + 0.5 * period


# Stiffness schedules of the three simulated cases: (leg schedule, ankle schedule).
CASE_SCHEDULES: Dict[int, Tuple[StiffnessSchedule, AnkleSchedule]] = {
    1: (
        StiffnessSchedule(k_td=14000.0, k_ss=14000.0, k_po=14000.0),
        AnkleSchedule(ka_td=200.0, ka_ss=400.0),
    ),
    2: (
        StiffnessSchedule(k_td=9000.0, k_ss=14000.0, k_po=14000.0),
        AnkleSchedule(ka_td=200.0, ka_ss=440.0),
    ),
    3: (
        StiffnessSchedule(k_td=14000.0, k_ss=10000.0, k_po=14000.0),
        AnkleSchedule(ka_td=200.0, ka_ss=420.0),
    ),
}


class ModelParams(BaseModel):
    """Physical and control parameters of one walker.

    Values are not range-checked on construction; use
    :func:`app.utils.validators.validate_params` to list violations.
    """

    model_config = ConfigDict(frozen=True)

    body_mass: float = Field(default=75.0, description="m (kg)")
    rest_leg_length: float = Field(default=1.0, description="L0 (m)")
    stride_period: float = Field(default=1.15, description="T (s)")
    foot_length: float = Field(default=0.18, description="L_f (m)")
    pushoff_angle: float = Field(default=math.radians(30.0), description="theta_po (rad)")
    pushoff_duration: float = Field(default=0.23, description="t_po (s)")
    retraction_amplitude: float = Field(default=0.04, description="dL (m)")
    gravity: float = Field(default=9.81, description="g (m/s^2)")
    leg_schedule: StiffnessSchedule = Field(default_factory=StiffnessSchedule)
    ankle_schedule: AnkleSchedule = Field(default_factory=AnkleSchedule)
    placement_law: FootPlacementLaw = Field(default_factory=FootPlacementLaw)
    stride_clock: StrideClock = Field(default_factory=StrideClock)
    swing_clearance: float = Field(default=0.08, description="h_clr (m)")
    td_subphase_fraction: float = Field(default=0.12, description="TD subphase share of T")
    gain_blend_window: float = Field(default=0.0, description="Linear gain blend width (s)")
    ankle_enabled: bool = Field(default=True, description="False selects the point-foot model")
    fall_height_fraction: float = Field(default=0.5, description="y_fall as a fraction of L0")
    min_swing_fraction: float = Field(default=0.15, description="Shortest swing as a fraction of T")
    ankle_neutral_angle: Optional[float] = Field(
        default=-0.03,
        description="Relaxed flat-foot ankle spring leg angle (rad); None takes the touchdown angle",
    )
    initial_speed: Optional[float] = Field(
        default=1.0,
        description="Mid-stance speed of the nominal initial state (m/s); None uses v_ref",
    )
    case_id: Optional[int] = Field(
        default=None, description="Stiffness case the schedules came from"
    )

    @model_validator(mode="before")
    @classmethod
    def _resolve_shorthand(cls, data: Any) -> Any:
        """Resolve ``"20% of T"`` style durations and length-relative defaults."""
        if not isinstance(data, dict):
            return data
        data = dict(data)
        period = float(data.get("stride_period", cls.model_fields["stride_period"].default))
        rest = float(data.get("rest_leg_length", cls.model_fields["rest_leg_length"].default))

        if "pushoff_duration" not in data:
            data["pushoff_duration"] = 0.2 * period
        elif isinstance(data["pushoff_duration"], str):
            data["pushoff_duration"] = parse_fraction_of(data["pushoff_duration"], period, "T")

        if "retraction_amplitude" not in data:
            data["retraction_amplitude"] = 0.04 * rest
        elif isinstance(data["retraction_amplitude"], str):
            data["retraction_amplitude"] = parse_fraction_of(
                data["retraction_amplitude"], rest, "L0"
            )

        if isinstance(data.get("pushoff_angle_deg"), (int, float)):
            data["pushoff_angle"] = math.radians(float(data.pop("pushoff_angle_deg")))
        return data

    @property
    def weight(self) -> float:
        """Body weight m·g (N)."""
        return self.body_mass * self.gravity

    @property
    def fall_height(self) -> float:
        return self.fall_height_fraction * self.rest_leg_length

    def for_case(self, case_id: int) -> "ModelParams":
        """Copy with the stiffness schedules of ``case_id``."""
        if case_id not in CASE_SCHEDULES:
            raise ConfigurationError(f"Unknown case id {case_id}; expected one of 1, 2, 3")
        leg, ankle = CASE_SCHEDULES[case_id]
        return self.model_copy(
            update={"leg_schedule": leg, "ankle_schedule": ankle, "case_id": case_id}
        )

    def with_placement(self, law: FootPlacementLaw) -> "ModelParams":
        return self.model_copy(update={"placement_law": law})

    def point_foot(self) -> "ModelParams":
        """Copy with the foot and ankle disabled."""
        return self.model_copy(update={"ankle_enabled": False})


def nominal_params(case_id: int = 1) -> ModelParams:
    """Nominal parameters for walking at 1.2 m/s."""
    return ModelParams().for_case(case_id)


class SimulationOptions(BaseModel):
    """Integration and logging tolerances of one run."""

    model_config = ConfigDict(frozen=True)

    rtol: float = Field(default=1e-9, gt=0)
    atol: float = Field(default=1e-11, gt=0)
    max_step: float = Field(default=0.01, gt=0, description="s")
    event_tolerance: float = Field(default=1e-9, gt=0, description="Natural units")
    event_time_tolerance: float = Field(default=1e-10, gt=0, description="s")
    log_interval: float = Field(default=1e-3, gt=0, description="Trace sample spacing (s)")

    @classmethod
    def from_settings(cls, settings: Settings, **overrides: Optional[float]) -> "SimulationOptions":
        """Options from application settings; explicit overrides take precedence."""
        values: Dict[str, Any] = {name: getattr(settings, name) for name in cls.model_fields}
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)
