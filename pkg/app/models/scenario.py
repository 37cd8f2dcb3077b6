"""Scenario and reference-gait models read from disk."""

from __future__ import annotations

from typing import Annotated, Dict, List, Literal, Optional, Union

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    field_validator,
    model_validator,
)

from app.config import Settings
from app.models.metrics import CURVE_CHANNELS
from app.models.params import ModelParams, SimulationOptions
from app.utils.exceptions import ScenarioError


class InitialCondition(BaseModel):
    """How the first state of a run is built.

    ``helper`` starts from mid-stance single support at ``speed`` (default
    v_ref). ``explicit`` takes the same leg layout and overwrites the mass
    height and velocity.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["helper", "explicit"] = "helper"
    speed: Optional[float] = None
    height: Optional[float] = None
    vx: Optional[float] = None
    vy: float = 0.0

    @model_validator(mode="after")
    def _explicit_is_complete(self) -> "InitialCondition":
        if self.kind == "explicit" and (self.height is None or self.vx is None):
            raise ValueError("explicit initial condition needs 'height' and 'vx'")
        return self


class SimulateBlock(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["simulate"] = "simulate"
    duration: float = Field(default=40.0, gt=0)


class SweepBlock(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["sweep"] = "sweep"
    cases: List[int] = Field(default_factory=lambda: [1, 2, 3], min_length=1)
    duration: float = Field(default=40.0, gt=0)


class AnkleStabilizationBlock(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["ankle-stabilization"] = "ankle-stabilization"
    switch_time: float = Field(default=30.0, gt=0)
    offsets: List[float] = Field(default_factory=lambda: [0.309, 0.312, 0.315], min_length=1)
    duration: float = Field(default=70.0, gt=0)

    @model_validator(mode="after")
    def _switch_before_end(self) -> "AnkleStabilizationBlock":
        if self.switch_time >= self.duration:
            raise ValueError("switch_time must precede duration")
        return self


class CompareBlock(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["compare"] = "compare"
    duration: float = Field(default=40.0, gt=0)


class PoincareBlock(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["poincare"] = "poincare"
    warmup_strides: int = Field(default=20, ge=2)
    damping: float = Field(default=0.8, gt=0, le=1)
    max_iterations: int = Field(default=60, ge=1)
    tolerance: float = Field(default=1e-8, gt=0)
    step: float = Field(default=1e-6, gt=0)
    difference: Literal["central", "forward"] = "central"


class PerturbBlock(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["perturb"] = "perturb"
    delta_vx: float = 0.1
    inject_time: float = Field(default=30.0, gt=0)
    duration: Optional[float] = Field(default=None, gt=0)


ExperimentBlock = Annotated[
    Union[
        SimulateBlock,
        SweepBlock,
        AnkleStabilizationBlock,
        CompareBlock,
        PoincareBlock,
        PerturbBlock,
    ],
    Field(discriminator="kind"),
]

EXPERIMENT_KINDS: tuple[str, ...] = (
    "simulate",
    "sweep",
    "ankle-stabilization",
    "compare",
    "poincare",
    "perturb",
)


class ToleranceOverrides(BaseModel):
    """Per-scenario integration tolerances; unset fields fall back to settings."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    rtol: Optional[float] = Field(default=None, gt=0)
    atol: Optional[float] = Field(default=None, gt=0)
    max_step: Optional[float] = Field(default=None, gt=0)
    event_tolerance: Optional[float] = Field(default=None, gt=0)
    event_time_tolerance: Optional[float] = Field(default=None, gt=0)
    log_interval: Optional[float] = Field(default=None, gt=0)


class Scenario(BaseModel):
    """A fully resolved experiment description."""

    model_config = ConfigDict(frozen=True)

    name: str
    model: ModelParams
    case: Optional[int] = None
    initial: InitialCondition = Field(default_factory=InitialCondition)
    experiment: ExperimentBlock = Field(default_factory=SimulateBlock)
    output_dir: Optional[str] = None
    tolerances: ToleranceOverrides = Field(default_factory=ToleranceOverrides)
    reference_gait: Optional[str] = None
    seed: Optional[int] = Field(default=None, description="Reserved; all runs are deterministic")
    source: Optional[str] = Field(default=None, description="File the scenario was read from")

    def options(self, settings: Settings) -> SimulationOptions:
        """Tolerances of the run: scenario overrides first, then settings."""
        return SimulationOptions.from_settings(settings, **self.tolerances.model_dump())

    def with_experiment(self, **updates: object) -> "Scenario":
        """Copy with fields of the experiment block replaced (CLI flags)."""
        present = {k: v for k, v in updates.items() if v is not None}
        if not present:
            return self
        try:
            block = type(self.experiment).model_validate(
                {**self.experiment.model_dump(), **present}
            )
        except ValidationError as exc:
            raise ScenarioError(
                f"Invalid {self.experiment.kind} options", validation_messages(exc)
            ) from None
        return self.model_copy(update={"experiment": block})


class ReferenceGait(BaseModel):
    """Percent-of-cycle reference curves, e.g. processed human data."""

    model_config = ConfigDict(frozen=True)

    percent: List[float]
    channels: Dict[str, List[float]] = Field(default_factory=dict)
    source: Optional[str] = None

    @field_validator("percent")
    @classmethod
    def _axis(cls, value: List[float]) -> List[float]:
        axis = np.asarray(value, dtype=float)
        if axis.size < 2:
            raise ValueError("percent axis needs at least two samples")
        if np.any(np.diff(axis) <= 0):
            raise ValueError("percent axis must be strictly increasing")
        if axis[0] < 0.0 or axis[-1] > 100.0:
            raise ValueError("percent axis must lie in [0, 100]")
        return value

    @model_validator(mode="after")
    def _channels(self) -> "ReferenceGait":
        for name, values in self.channels.items():
            if name not in CURVE_CHANNELS:
                raise ValueError(f"unknown reference channel '{name}'")
            if len(values) != len(self.percent):
                raise ValueError(
                    f"channel '{name}' has {len(values)} samples, axis has {len(self.percent)}"
                )
        return self

    def has(self, channel: str) -> bool:
        return channel in self.channels


def validation_messages(exc: ValidationError) -> List[str]:
    """One ``key.path: message`` line per pydantic error."""
    lines = []
    for error in exc.errors():
        location = ".".join(str(part) for part in error["loc"])
        lines.append(f"{location}: {error['msg']}" if location else error["msg"])
    return lines


class RunManifest(BaseModel):
    """Everything needed to repeat a run: resolved scenario, tolerances and version."""

    package: str = "ankle-walker"
    version: str
    command: List[str] = Field(default_factory=list)
    scenario: Scenario
    options: SimulationOptions
    jobs: int = 1
    outputs: List[str] = Field(default_factory=list)
    fell: bool = False


BLOCK_TYPES: Dict[str, type[BaseModel]] = {
    "simulate": SimulateBlock,
    "sweep": SweepBlock,
    "ankle-stabilization": AnkleStabilizationBlock,
    "compare": CompareBlock,
    "poincare": PoincareBlock,
    "perturb": PerturbBlock,
}


def retarget(scenario: Scenario, kind: str) -> Scenario:
    """
    Scenario with a default ``kind`` experiment block unless it already has one.

    Lets a command reuse the model of a scenario written for another experiment.

    Raises:
        ScenarioError: If ``kind`` is not an experiment kind
    """
    if scenario.experiment.kind == kind:
        return scenario
    if kind not in BLOCK_TYPES:
        raise ScenarioError(
            f"Unknown experiment kind '{kind}'; expected one of {', '.join(EXPERIMENT_KINDS)}"
        )
    return scenario.model_copy(update={"experiment": BLOCK_TYPES[kind]()})
