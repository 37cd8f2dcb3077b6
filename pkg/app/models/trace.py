"""Time series produced by one simulation run."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from app.models.state import LegId, PhaseId, WalkerState

LEG_SIGNALS: tuple[str, ...] = (
    "L",
    "L_d",
    "F",
    "theta",
    "tau_a",
    "F_h",
    "F_t",
    "heel_x",
    "heel_y",
    "toe_x",
    "toe_y",
    "k",
    "b",
    "k_a",
    "dx_target",
    "theta_a",
    "theta_f",
)

MASS_COLUMNS: tuple[str, ...] = ("t", "x_m", "y_m", "vx", "vy", "phase")


def leg_column(leg: LegId, signal: str) -> str:
    return f"{signal}_{leg.value}"


TRACE_COLUMNS: tuple[str, ...] = (
    MASS_COLUMNS
    + tuple(leg_column(leg, s) for leg in (LegId.LEFT, LegId.RIGHT) for s in LEG_SIGNALS)
    + ("event",)
)


class EventKind(str, Enum):
    HEEL_OFF = "HeelOff"
    TOE_OFF = "ToeOff"
    TOUCHDOWN = "Touchdown"
    FALL = "Fall"
    GAIN_SWITCH = "GainSwitch"


@dataclass
class EventRecord:
    """A located event and the states on either side of its transition."""

    t: float
    kind: EventKind
    leg: Optional[LegId]
    residual: float
    phase_before: PhaseId
    phase_after: Optional[PhaseId]
    state_before: Optional[WalkerState] = None
    state_after: Optional[WalkerState] = None

    @property
    def label(self) -> str:
        return self.kind.value if self.leg is None else f"{self.kind.value}({self.leg.value})"


@dataclass(frozen=True)
class FallMarker:
    t: float
    reason: str


@dataclass
class GaitTrace:
    """Uniformly logged samples plus the event records of one run."""

    frame: pd.DataFrame
    events: List[EventRecord] = field(default_factory=list)
    fall: Optional[FallMarker] = None
    final_state: Optional[WalkerState] = None

    @property
    def fell(self) -> bool:
        return self.fall is not None

    @property
    def time(self) -> np.ndarray:
        return self.frame["t"].to_numpy()

    def column(self, name: str) -> np.ndarray:
        return self.frame[name].to_numpy()

    def leg(self, leg: LegId, signal: str) -> np.ndarray:
        return self.frame[leg_column(leg, signal)].to_numpy()

    def events_of(self, kind: EventKind, leg: Optional[LegId] = None) -> List[EventRecord]:
        return [e for e in self.events if e.kind is kind and (leg is None or e.leg is leg)]

    def __len__(self) -> int:
        return len(self.frame)


class TraceRecorder:
    """Accumulates rows and event records during a run."""

    def __init__(self) -> None:
        self._rows: List[Sequence[object]] = []
        self.events: List[EventRecord] = []
        self.fall: Optional[FallMarker] = None
        self.last_time: Optional[float] = None

    def add_row(self, row: Sequence[object]) -> None:
        t = float(row[0])  # type: ignore[arg-type]
        if self.last_time is not None and t <= self.last_time:
            return
        self._rows.append(row)
        self.last_time = t

    def add_event(self, record: EventRecord) -> None:
        self.events.append(record)

    def extend(self, trace: GaitTrace) -> None:
        """Append an earlier trace (used when a run is continued)."""
        for row in trace.frame.itertuples(index=False, name=None):
            self.add_row(row)
        self.events.extend(trace.events)
        self.fall = trace.fall

    def build(self, final_state: Optional[WalkerState] = None) -> GaitTrace:
        frame = pd.DataFrame(self._rows, columns=list(TRACE_COLUMNS))
        return GaitTrace(
            frame=frame, events=list(self.events), fall=self.fall, final_state=final_state
        )


def concatenate(first: GaitTrace, second: GaitTrace) -> GaitTrace:
    """Join a run with its continuation; the continuation's first row is dropped if duplicated."""
    recorder = TraceRecorder()
    recorder.extend(first)
    recorder.extend(second)
    return recorder.build(final_state=second.final_state)


def trace_summary(trace: GaitTrace) -> Dict[str, float]:
    t = trace.time
    return {
        "duration": float(t[-1] - t[0]) if len(t) else 0.0,
        "samples": float(len(t)),
        "events": float(len(trace.events)),
    }
