"""Forced-oscillation clocking and velocity-based foot placement."""

from __future__ import annotations

from app.models.params import FootPlacementLaw, StrideClock
from app.models.state import LegId


def clock_phase(t: float, leg: LegId, clock: StrideClock, period: float) -> float:
    """
    Phase of a leg's free-running clock.

    Args:
        t: Global time (s)
        leg: Leg whose clock is read
        clock: Clock offsets
        period: Stride period T (s)

    Returns:
        (t + φ_leg) mod T, in [0, T)
    """
    phase = (t + clock.offset(leg.value, period)) % period
    return 0.0 if phase >= period else phase


def signed_clock_phase(t: float, leg: LegId, clock: StrideClock, period: float) -> float:
    """Clock phase folded into [-T/2, T/2) around the leg's stride start."""
    phase = clock_phase(t, leg, clock, period)
    return phase - period if phase >= 0.5 * period else phase


def placement_target(speed: float, law: FootPlacementLaw) -> float:
    """
    Horizontal heel target ahead of the mass at touchdown.

    Args:
        speed: Forward mass velocity (m/s)
        law: Placement law

    Returns:
        c0 + c1·ẋ + c2·(ẋ − v_ref), or the override when one is set
    """
    if law.override is not None:
        return law.override
    return law.c0 + law.c1 * speed + law.c2 * (speed - law.v_ref)


def set_override(law: FootPlacementLaw, target: float) -> FootPlacementLaw:
    """Law that places the foot at a fixed offset regardless of speed."""
    return law.model_copy(update={"override": target})


def clear_override(law: FootPlacementLaw) -> FootPlacementLaw:
    return law.model_copy(update={"override": None})
