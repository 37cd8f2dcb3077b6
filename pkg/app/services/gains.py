"""Subphase gain schedules: leg stiffness, damping and ankle stiffness."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from app.models.params import CASE_SCHEDULES, ModelParams, SubphaseId
from app.models.state import LegRole, PhaseId
from app.utils.exceptions import ConfigurationError, ParameterError


@dataclass(frozen=True)
class Gains:
    """Active gains of one stance leg."""

    k: float
    b: float
    k_a: float


ZERO_GAINS = Gains(0.0, 0.0, 0.0)


def damping_from_ratio(zeta: float, k: float, m: float) -> float:
    """
    Convert a damping ratio into a damping coefficient, b = 2·ζ·√(k·m).

    Args:
        zeta: Damping ratio (dimensionless, ≥ 0)
        k: Stiffness (N/m)
        m: Mass (kg)

    Returns:
        Damping coefficient (N·s/m)

    Raises:
        ParameterError: If k or m is not positive, or ζ is negative
    """
    if k <= 0 or m <= 0:
        raise ParameterError(f"Stiffness and mass must be positive (k={k}, m={m})")
    if zeta < 0:
        raise ParameterError(f"Damping ratio must be non-negative (zeta={zeta})")
    return 2.0 * zeta * math.sqrt(k * m)


def subphase_of(
    cycle_fraction: float,
    phase: PhaseId,
    params: ModelParams,
    role: LegRole = LegRole.FLAT,
) -> SubphaseId:
    """
    Classify the stance subphase of a contacting leg.

    Args:
        cycle_fraction: Time since the leg's stride start divided by T
        phase: Current walking phase
        params: Model parameters (supplies the TD subphase fraction)
        role: Contact role of the leg being classified

    Returns:
        PO for the pushing-off leg, TD early in flat-foot stance, SS otherwise
    """
    if role is LegRole.PUSHOFF and phase.is_pushoff:
        return SubphaseId.PO
    if role is LegRole.FLAT and cycle_fraction < params.td_subphase_fraction:
        return SubphaseId.TD
    return SubphaseId.SS


def gains_at(
    subphase: SubphaseId, case_id: Optional[int], params: ModelParams
) -> Gains:
    """
    Look up the gains of a subphase.

    Args:
        subphase: Active stance subphase
        case_id: Stiffness case (1, 2, 3); ``None`` uses the schedules held by ``params``
        params: Model parameters (mass for the damping conversion)

    Returns:
        Leg stiffness, leg damping coefficient and ankle stiffness

    Raises:
        ConfigurationError: If the case id is unknown
    """
    if case_id is None:
        leg, ankle = params.leg_schedule, params.ankle_schedule
    elif case_id in CASE_SCHEDULES:
        leg, ankle = CASE_SCHEDULES[case_id]
    else:
        raise ConfigurationError(f"Unknown case id {case_id}; expected one of 1, 2, 3")

    k = leg.stiffness(subphase)
    b = damping_from_ratio(leg.damping_ratio(subphase), k, params.body_mass)
    k_a = ankle.stiffness(subphase) if params.ankle_enabled else 0.0
    return Gains(k=k, b=b, k_a=k_a)


def blend_gains(start: Gains, end: Gains, weight: float) -> Gains:
    """Linear interpolation between two gain sets, ``weight`` clipped to [0, 1]."""
    w = min(1.0, max(0.0, weight))
    return Gains(
        k=start.k + w * (end.k - start.k),
        b=start.b + w * (end.b - start.b),
        k_a=start.k_a + w * (end.k_a - start.k_a),
    )
