"""Reference curves built from boundary-value quintic polynomials.

Three curves drive the walker: the forced-oscillation leg length, the
feed-forward push-off foot angle and the swing-heel path relative to the mass.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Sequence, Tuple

import numpy as np
from numpy.polynomial import polynomial as P

from app.models.params import ModelParams
from app.utils.exceptions import ParameterError, TrajectoryDomainError

# Rows: position, velocity and acceleration of s^3, s^4, s^5 at s = 1.
_END_CONDITIONS = np.array([[1.0, 1.0, 1.0], [3.0, 4.0, 5.0], [6.0, 12.0, 20.0]])


@dataclass(frozen=True)
class QuinticSegment:
    """Degree-5 polynomial in local time ``t - t_start``."""

    coefficients: Tuple[float, ...]
    t_start: float
    t_end: float
    _derivatives: Tuple[np.ndarray, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not self.t_end > self.t_start:
            raise TrajectoryDomainError(
                f"Segment end {self.t_end} must be after its start {self.t_start}"
            )
        base = np.asarray(self.coefficients, dtype=float)
        derivatives = [base]
        for _ in range(5):
            derivatives.append(P.polyder(derivatives[-1]))
        object.__setattr__(self, "_derivatives", tuple(derivatives))

    @property
    def duration(self) -> float:
        return self.t_end - self.t_start

    def contains(self, t: float) -> bool:
        return self.t_start <= t <= self.t_end

    def evaluate(self, t: float, order: int = 0, extrapolate: bool = False) -> float:
        """Value of the ``order``-th derivative at ``t``."""
        if not extrapolate and not self.contains(t):
            raise TrajectoryDomainError(
                f"t={t} outside segment [{self.t_start}, {self.t_end}]"
            )
        if order >= len(self._derivatives):
            return 0.0
        return float(P.polyval(t - self.t_start, self._derivatives[order]))


def quintic_between(
    p0: float,
    v0: float,
    a0: float,
    p1: float,
    v1: float,
    a1: float,
    t0: float,
    t1: float,
) -> QuinticSegment:
    """
    Build the unique quintic matching position, velocity and acceleration at both ends.

    Args:
        p0, v0, a0: Boundary conditions at ``t0``
        p1, v1, a1: Boundary conditions at ``t1``
        t0: Segment start (s)
        t1: Segment end (s)

    Returns:
        QuinticSegment on [t0, t1]

    Raises:
        TrajectoryDomainError: If ``t1 <= t0``
    """
    if not t1 > t0:
        raise TrajectoryDomainError(f"Quintic end time {t1} must exceed start time {t0}")
    h = t1 - t0
    # Solve in normalised time s = (t - t0) / h for conditioning.
    d0, d1, d2 = p0, v0 * h, 0.5 * a0 * h * h
    rhs = np.array([p1 - d0 - d1 - d2, v1 * h - d1 - 2.0 * d2, a1 * h * h - 2.0 * d2])
    d3, d4, d5 = np.linalg.solve(_END_CONDITIONS, rhs)
    scaled = [d / h**i for i, d in enumerate((d0, d1, d2, d3, d4, d5))]
    return QuinticSegment(coefficients=tuple(float(c) for c in scaled), t_start=t0, t_end=t1)


@dataclass(frozen=True)
class PiecewiseCurve:
    """Contiguous sequence of quintic segments."""

    segments: Tuple[QuinticSegment, ...]

    def __post_init__(self) -> None:
        if not self.segments:
            raise TrajectoryDomainError("A piecewise curve needs at least one segment")
        for left, right in zip(self.segments, self.segments[1:]):
            if left.t_end != right.t_start:
                raise TrajectoryDomainError(
                    f"Segments are not contiguous at {left.t_end} / {right.t_start}"
                )

    @property
    def t_start(self) -> float:
        return self.segments[0].t_start

    @property
    def t_end(self) -> float:
        return self.segments[-1].t_end

    @property
    def knots(self) -> List[float]:
        return [s.t_start for s in self.segments[1:]]

    def segment_at(self, t: float) -> QuinticSegment:
        if not self.t_start <= t <= self.t_end:
            raise TrajectoryDomainError(f"t={t} outside curve [{self.t_start}, {self.t_end}]")
        index = bisect.bisect_right([s.t_start for s in self.segments], t) - 1
        return self.segments[max(index, 0)]

    def evaluate(self, t: float, order: int = 0) -> float:
        return self.segment_at(t).evaluate(t, order)

    def knot_mismatch(self, order: int) -> List[float]:
        """Jump of the ``order``-th derivative at each interior knot (right minus left)."""
        jumps = []
        for left, right in zip(self.segments, self.segments[1:]):
            knot = left.t_end
            jumps.append(right.evaluate(knot, order) - left.evaluate(knot, order))
        return jumps


# ---------------------------------------------------------------- leg length


@lru_cache(maxsize=64)
def _retraction_curve(rest_length: float, amplitude: float, period: float) -> PiecewiseCurve:
    h = 0.25 * period
    # Curvature at the minimum that makes the jerk vanish there, so the
    # mirrored return segment stitches with C3 continuity.
    a_min = 20.0 * amplitude / (3.0 * h * h)
    low = rest_length - amplitude
    down = quintic_between(rest_length, 0.0, 0.0, low, 0.0, a_min, 0.5 * period, 0.75 * period)
    up = quintic_between(low, 0.0, a_min, rest_length, 0.0, 0.0, 0.75 * period, period)
    return PiecewiseCurve((down, up))


def leg_length_curve(params: ModelParams) -> PiecewiseCurve:
    """Retraction half of the forced-oscillation leg-length profile."""
    return _retraction_curve(
        params.rest_leg_length, params.retraction_amplitude, params.stride_period
    )


def leg_length_reference(clock_phase: float, params: ModelParams) -> Tuple[float, float]:
    """
    Desired leg length and its rate at a clock phase.

    Args:
        clock_phase: Leg clock phase in [0, T) (s)
        params: Model parameters

    Returns:
        (L_d, dL_d/dt)

    Raises:
        TrajectoryDomainError: If the phase lies outside [0, T)
    """
    period = params.stride_period
    if not 0.0 <= clock_phase < period:
        raise TrajectoryDomainError(f"Clock phase {clock_phase} outside [0, {period})")
    if clock_phase < 0.5 * period:
        return params.rest_leg_length, 0.0
    segment = leg_length_curve(params).segment_at(clock_phase)
    return segment.evaluate(clock_phase), segment.evaluate(clock_phase, 1)


# ---------------------------------------------------------------- push-off


@lru_cache(maxsize=64)
def _foot_angle_segment(angle: float, duration: float) -> QuinticSegment:
    return quintic_between(0.0, 0.0, 0.0, angle, 0.0, 0.0, 0.0, duration)


def pushoff_foot_angle(t_since_po: float, params: ModelParams) -> Tuple[float, float]:
    """
    Feed-forward heel-lift angle of the pushing-off foot.

    Args:
        t_since_po: Time since heel-off (s)
        params: Model parameters (theta_po, t_po)

    Returns:
        (theta_f, dtheta_f/dt); held at theta_po after t_po
    """
    if t_since_po >= params.pushoff_duration:
        return params.pushoff_angle, 0.0
    t = max(t_since_po, 0.0)
    segment = _foot_angle_segment(params.pushoff_angle, params.pushoff_duration)
    return segment.evaluate(t), segment.evaluate(t, 1)


# ---------------------------------------------------------------- swing


@lru_cache(maxsize=1)
def _unit_min_jerk() -> QuinticSegment:
    return quintic_between(0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0)


def _blend(p0: float, p1: float, s: float, extrapolate: bool) -> Tuple[float, float]:
    unit = _unit_min_jerk()
    return (
        p0 + (p1 - p0) * unit.evaluate(s, 0, extrapolate),
        (p1 - p0) * unit.evaluate(s, 1, extrapolate),
    )


def swing_heel_reference(
    s: float,
    start_rel: Sequence[float],
    target_rel: Sequence[float],
    h_clr: float,
    extrapolate: bool = False,
) -> Tuple[Tuple[float, float], Tuple[float, float]]:
    """
    Swing-heel position relative to the mass along the normalised swing.

    Horizontal coordinates are relative to the mass; vertical coordinates are
    heights above the ground.

    Args:
        s: Normalised swing progress in [0, 1]
        start_rel: Heel at lift-off (x relative to the mass, height)
        target_rel: Touchdown target (x relative to the mass, height)
        h_clr: Apex height reached at s = 0.5 (m)
        extrapolate: Continue the descent polynomial past s = 1

    Returns:
        (position, derivative with respect to s)

    Raises:
        ParameterError: If ``h_clr`` is not positive
        TrajectoryDomainError: If ``s`` is outside [0, 1] and not extrapolating
    """
    if h_clr <= 0:
        raise ParameterError(f"Swing clearance must be positive (h_clr={h_clr})")
    if not extrapolate and not 0.0 <= s <= 1.0:
        raise TrajectoryDomainError(f"Swing progress {s} outside [0, 1]")

    x, dx = _blend(start_rel[0], target_rel[0], min(max(s, 0.0), 1.0), False)
    if s > 1.0:
        dx = 0.0
    if s < 0.5:
        y, dy = _blend(start_rel[1], h_clr, 2.0 * s, extrapolate)
    else:
        y, dy = _blend(h_clr, target_rel[1], 2.0 * s - 1.0, extrapolate)
    return (x, y), (dx, 2.0 * dy)
