"""Stride segmentation and gait characteristics of simulated traces."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd
from scipy.integrate import trapezoid
from scipy.interpolate import PchipInterpolator
from scipy.signal import find_peaks

from app.models.metrics import CycleCurves, CycleMetrics, EnergyBalance, GaitSummary
from app.models.params import ModelParams
from app.models.state import LegId
from app.models.trace import EventKind, EventRecord, GaitTrace, leg_column
from app.utils.exceptions import AnalysisError

logger = logging.getLogger(__name__)

DEFAULT_SKIP = 10
RESAMPLE_POINTS = 1001
# Minimum prominence of a GRF_y hump, in units of body weight.
PEAK_PROMINENCE = 0.02


@dataclass
class Cycle:
    """Samples and events between two consecutive touchdowns of one leg."""

    index: int
    leg: LegId
    t_start: float
    t_end: float
    frame: pd.DataFrame
    events: List[EventRecord] = field(default_factory=list)
    transient: bool = False

    @property
    def duration(self) -> float:
        return self.t_end - self.t_start

    def percent_of(self, t: float) -> float:
        return 100.0 * (t - self.t_start) / self.duration

    def first_event(self, kind: EventKind, leg: LegId) -> Optional[EventRecord]:
        return next((e for e in self.events if e.kind is kind and e.leg is leg), None)


def segment_cycles(
    trace: GaitTrace, leg: LegId = LegId.LEFT, n_skip: int = DEFAULT_SKIP
) -> List[Cycle]:
    """
    Split a trace into strides bounded by consecutive touchdowns of ``leg``.

    Args:
        trace: Simulation trace
        leg: Reference leg
        n_skip: Number of leading strides flagged as transient

    Returns:
        Complete cycles in time order; a trailing partial stride is dropped

    Raises:
        AnalysisError: If the trace holds fewer than two touchdowns of ``leg``
    """
    if len(trace) == 0:
        raise AnalysisError("Cannot segment an empty trace")
    touchdowns = [e.t for e in trace.events_of(EventKind.TOUCHDOWN, leg)]
    if len(touchdowns) < 2:
        raise AnalysisError(
            f"Need at least two {leg.value}-leg touchdowns to form a cycle, found {len(touchdowns)}"
        )
    t = trace.time
    cycles = []
    for index, (t0, t1) in enumerate(zip(touchdowns, touchdowns[1:])):
        lo, hi = np.searchsorted(t, t0, "left"), np.searchsorted(t, t1, "right")
        cycles.append(
            Cycle(
                index=index,
                leg=leg,
                t_start=t0,
                t_end=t1,
                frame=trace.frame.iloc[lo:hi].reset_index(drop=True),
                events=[e for e in trace.events if t0 < e.t <= t1],
                transient=index < n_skip,
            )
        )
    return cycles


def leg_ground_reaction(frame: pd.DataFrame, leg: LegId) -> tuple[np.ndarray, np.ndarray]:
    """Horizontal and vertical ground reaction of one leg (N)."""
    force = frame[leg_column(leg, "F")].to_numpy()
    torque = frame[leg_column(leg, "tau_a")].to_numpy()
    angle = frame[leg_column(leg, "theta")].to_numpy()
    length = frame[leg_column(leg, "L")].to_numpy()
    transverse = torque / length
    grf_x = force * np.sin(angle) - transverse * np.cos(angle)
    grf_y = force * np.cos(angle) + transverse * np.sin(angle)
    return grf_x, grf_y


def time_mean(t: np.ndarray, values: np.ndarray) -> float:
    span = t[-1] - t[0]
    return float(trapezoid(values, t) / span) if span > 0 else float(values[0])


def _resample(t: np.ndarray, values: np.ndarray, grid: np.ndarray) -> np.ndarray:
    return PchipInterpolator(t, values)(grid)


def cycle_metrics(cycle: Cycle, params: ModelParams) -> CycleMetrics:
    """
    Gait characteristics of one stride.

    GRF curves belong to the reference leg and are normalised by m·g; the
    total (both-leg) mean GRFs are reported separately.
    """
    frame = cycle.frame
    t = frame["t"].to_numpy()
    weight = params.weight
    ref, other = cycle.leg, cycle.leg.other

    grf_x, grf_y = leg_ground_reaction(frame, ref)
    other_x, other_y = leg_ground_reaction(frame, other)
    y = frame["y_m"].to_numpy()

    percent = 100.0 * (t - cycle.t_start) / cycle.duration
    grid = np.linspace(0.0, 100.0, RESAMPLE_POINTS)
    curves = CycleCurves(
        percent=grid,
        grf_x=_resample(percent, grf_x / weight, grid),
        grf_y=_resample(percent, grf_y / weight, grid),
        delta_y_com=_resample(percent, y - time_mean(t, y), grid),
        leg_angle=_resample(percent, frame[leg_column(ref, "theta")].to_numpy(), grid),
        ankle_moment=_resample(percent, frame[leg_column(ref, "tau_a")].to_numpy(), grid),
    )

    heel_off = cycle.first_event(EventKind.HEEL_OFF, ref)
    toe_off = cycle.first_event(EventKind.TOE_OFF, ref)
    opposite_td = cycle.first_event(EventKind.TOUCHDOWN, other)
    toe_off_pct = cycle.percent_of(toe_off.t) if toe_off else None

    stance = curves.grf_y if toe_off_pct is None else curves.grf_y[grid <= toe_off_pct]
    peaks, _ = find_peaks(stance, prominence=PEAK_PROMINENCE)
    peak_ratio = None
    if len(peaks) >= 2:
        tallest = sorted(sorted(peaks, key=lambda i: stance[i])[-2:])
        peak_ratio = float(stance[tallest[0]] / stance[tallest[1]])

    x = frame["x_m"].to_numpy()
    return CycleMetrics(
        index=cycle.index,
        leg=ref.value,
        t_start=cycle.t_start,
        t_end=cycle.t_end,
        transient=cycle.transient,
        curves=curves,
        heel_off_pct=cycle.percent_of(heel_off.t) if heel_off else None,
        opposite_touchdown_pct=cycle.percent_of(opposite_td.t) if opposite_td else None,
        toe_off_pct=toe_off_pct,
        average_speed=float((x[-1] - x[0]) / cycle.duration),
        peak_count=len(peaks),
        peak_ratio=peak_ratio,
        grf_x_neg_to_pos=_negative_to_positive(curves.grf_x, grid, toe_off_pct),
        mean_grf_y_total=time_mean(t, (grf_y + other_y) / weight),
        mean_grf_x_total=time_mean(t, (grf_x + other_x) / weight),
    )


def _negative_to_positive(
    grf_x: np.ndarray, grid: np.ndarray, toe_off_pct: Optional[float]
) -> bool:
    stance = grf_x if toe_off_pct is None else grf_x[grid <= toe_off_pct]
    negative = np.flatnonzero(stance < 0.0)
    if negative.size == 0:
        return False
    return bool(np.any(stance[negative[0] :] > 0.0))


def analyze_trace(
    trace: GaitTrace,
    params: ModelParams,
    leg: LegId = LegId.LEFT,
    n_skip: int = DEFAULT_SKIP,
) -> List[CycleMetrics]:
    return [cycle_metrics(c, params) for c in segment_cycles(trace, leg, n_skip)]


def converged(metrics: Sequence[CycleMetrics]) -> List[CycleMetrics]:
    """Non-transient strides, or all strides when none has settled yet."""
    steady = [m for m in metrics if not m.transient]
    return steady or list(metrics)


def _mean(values: Sequence[Optional[float]]) -> Optional[float]:
    present = [v for v in values if v is not None]
    return float(np.mean(present)) if present else None


def summarize(trace: GaitTrace, params: ModelParams, leg: LegId = LegId.LEFT) -> GaitSummary:
    """Averages over the converged strides of a run; a run too short to segment has no averages."""
    fall = trace.fall
    try:
        metrics = analyze_trace(trace, params, leg)
    except AnalysisError as exc:
        logger.warning("No complete stride to summarise: %s", exc)
        return GaitSummary(
            strides=0,
            converged_strides=0,
            fell=fall is not None,
            fall_time=fall.t if fall else None,
            fall_reason=fall.reason if fall else None,
        )
    steady = converged(metrics)
    ratio = _mean([m.peak_ratio for m in steady])
    return GaitSummary(
        strides=len(metrics),
        converged_strides=sum(1 for m in metrics if not m.transient),
        mean_speed=_mean([m.average_speed for m in steady]),
        peak_ratio=ratio,
        asymmetry=None if ratio is None else abs(ratio - 1.0),
        heel_off_pct=_mean([m.heel_off_pct for m in steady]),
        opposite_touchdown_pct=_mean([m.opposite_touchdown_pct for m in steady]),
        toe_off_pct=_mean([m.toe_off_pct for m in steady]),
        stance_fraction=_mean([m.stance_fraction for m in steady]),
        m_shaped_fraction=float(np.mean([m.m_shaped for m in steady])),
        mean_grf_y_total=_mean([m.mean_grf_y_total for m in steady]),
        fell=fall is not None,
        fall_time=fall.t if fall else None,
        fall_reason=fall.reason if fall else None,
    )


def actuator_power(frame: pd.DataFrame) -> np.ndarray:
    """Power delivered to the mass by both legs (W)."""
    vx = frame["vx"].to_numpy()
    vy = frame["vy"].to_numpy()
    power = np.zeros(len(frame))
    for leg in (LegId.LEFT, LegId.RIGHT):
        fx, fy = leg_ground_reaction(frame, leg)
        power += fx * vx + fy * vy
    return power


def mechanical_energy(frame: pd.DataFrame, params: ModelParams) -> np.ndarray:
    vx = frame["vx"].to_numpy()
    vy = frame["vy"].to_numpy()
    y = frame["y_m"].to_numpy()
    return 0.5 * params.body_mass * (vx**2 + vy**2) + params.weight * y


def stride_energy_balance(
    trace: GaitTrace, params: ModelParams, leg: LegId = LegId.LEFT
) -> List[EnergyBalance]:
    """
    Compare the change of ½m|V|² + m·g·y with the trapezoidal integral of leg power per stride.

    Raises:
        AnalysisError: If the trace has no complete stride
    """
    balances = []
    for cycle in segment_cycles(trace, leg, n_skip=0):
        t = cycle.frame["t"].to_numpy()
        power = actuator_power(cycle.frame)
        energy = mechanical_energy(cycle.frame, params)
        balances.append(
            EnergyBalance(
                t_start=cycle.t_start,
                t_end=cycle.t_end,
                energy_change=float(energy[-1] - energy[0]),
                work=float(trapezoid(power, t)),
                gross_work=float(trapezoid(np.abs(power), t)),
            )
        )
    return balances
