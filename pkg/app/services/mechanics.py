"""Force balance of a massless compliant leg with a massless foot.

Sign conventions: the leg angle θ is measured from the vertical and is positive
when the mass is forward of the ankle. The contact-force and push-off formulas
take the leg angle the other way round (positive when the foot is ahead of the
mass), so callers pass −θ; their foot angle is the heel lift, positive when the
heel is raised. Positive ankle torque is plantarflexion: it presses the toe down
and pulls the mass back across the leg. The ankle sits at the heel end of the
foot, and the toe is at ``ankle + L_f·(cos θ_f, −sin θ_f)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

from app.utils.exceptions import GeometryError, SingularityError

SINGULARITY_TOLERANCE = 1e-9


@dataclass(frozen=True)
class LegGeometry:
    """Leg kinematics between the ankle and the mass."""

    ankle_pos: Tuple[float, float]
    length: float
    length_rate: float
    angle: float
    angle_rate: float
    unit_axial: Tuple[float, float]
    unit_transverse: Tuple[float, float]


@dataclass(frozen=True)
class ContactForces:
    """Vertical ground reactions under the heel and the toe (N)."""

    heel: float
    toe: float


@dataclass(frozen=True)
class AnkleOutput:
    torque: float
    ankle_angle: float
    foot_angle: float


def leg_geometry(
    mass_pos: Sequence[float],
    mass_vel: Sequence[float],
    ankle_pos: Sequence[float],
    ankle_vel: Sequence[float] = (0.0, 0.0),
) -> LegGeometry:
    """
    Leg length, angle and their rates for an ankle and a mass.

    Raises:
        GeometryError: If the ankle coincides with the mass
    """
    dx = mass_pos[0] - ankle_pos[0]
    dy = mass_pos[1] - ankle_pos[1]
    length = math.hypot(dx, dy)
    if length <= 0.0:
        raise GeometryError("Leg length must be positive")
    rvx = mass_vel[0] - ankle_vel[0]
    rvy = mass_vel[1] - ankle_vel[1]
    ax, ay = dx / length, dy / length
    return LegGeometry(
        ankle_pos=(float(ankle_pos[0]), float(ankle_pos[1])),
        length=length,
        length_rate=ax * rvx + ay * rvy,
        angle=math.atan2(dx, dy),
        angle_rate=(dy * rvx - dx * rvy) / (length * length),
        unit_axial=(ax, ay),
        unit_transverse=(ay, -ax),
    )


def axial_force_raw(
    k: float, b: float, l_d: float, l_d_rate: float, l: float, l_rate: float
) -> float:
    """Spring-damper force before the unilateral clamp."""
    return k * (l_d - l) + b * (l_d_rate - l_rate)


def axial_leg_force(
    k: float, b: float, l_d: float, l_d_rate: float, l: float, l_rate: float
) -> float:
    """
    Axial leg force F = k(L_d − L) + b(L̇_d − L̇), clamped at zero.

    Args:
        k: Leg stiffness (N/m)
        b: Leg damping (N·s/m)
        l_d, l_d_rate: Desired length (m) and rate (m/s)
        l, l_rate: Actual length (m) and rate (m/s)

    Returns:
        Non-negative axial force (N)
    """
    return max(0.0, axial_force_raw(k, b, l_d, l_d_rate, l, l_rate))


def flatfoot_ankle_torque(angle: float, neutral_angle: float, k_a: float) -> float:
    """Ankle spring resisting dorsiflexion past its neutral leg angle."""
    return k_a * max(0.0, angle - neutral_angle)


def flatfoot_contact_forces(
    force: float, angle: float, length: float, foot_length: float, torque: float
) -> ContactForces:
    """
    Heel and toe reactions of a flat foot.

    A negative heel reaction is a valid output: its zero crossing is heel-off.
    """
    heel = force * math.cos(angle) - torque * (math.sin(angle) / length + 1.0 / foot_length)
    return ContactForces(heel=heel, toe=torque / foot_length)


def pushoff_ankle_torque(
    force: float, angle: float, foot_angle: float, length: float, foot_length: float
) -> float:
    """
    Ankle torque that holds a prescribed foot angle while only the toe is in contact.

    Args:
        force: Axial leg force (N)
        angle: Leg angle, positive with the foot ahead of the mass (rad)
        foot_angle: Heel lift θ_f (rad)
        length: Leg length (m)
        foot_length: Foot length (m)

    Returns:
        Ankle torque (N·m)

    Raises:
        SingularityError: If 1 + (L_f/L)·sin(θ_f + θ_i) vanishes
    """
    total = foot_angle + angle
    denominator = 1.0 + (foot_length / length) * math.sin(total)
    if abs(denominator) < SINGULARITY_TOLERANCE:
        raise SingularityError(
            f"Push-off torque is singular (theta_f + theta_i = {total:.6f} rad)"
        )
    return force * foot_length * math.cos(total) / denominator


def pushoff_toe_force(force: float, angle: float, torque: float, length: float) -> float:
    """Vertical toe reaction while the heel is off the ground."""
    return force * math.cos(angle) - torque * math.sin(angle) / length


def leg_force_on_mass(force: float, torque: float, geom: LegGeometry) -> Tuple[float, float]:
    """
    Force a contacting leg exerts on the mass.

    The axial force acts along the leg; the ankle torque adds τ/L against the
    transverse unit vector, so the resultant passes through the centre of pressure.

    Raises:
        GeometryError: If the leg length is not positive
    """
    if geom.length <= 0.0:
        raise GeometryError("Leg length must be positive")
    transverse = torque / geom.length
    return (
        force * geom.unit_axial[0] - transverse * geom.unit_transverse[0],
        force * geom.unit_axial[1] - transverse * geom.unit_transverse[1],
    )


def ankle_output(torque: float, leg_angle: float, foot_angle: float) -> AnkleOutput:
    """
    Ankle joint state of a contacting leg.

    Args:
        torque: Ankle torque (N·m)
        leg_angle: Leg angle θ (rad), positive with the mass forward of the ankle
        foot_angle: Heel lift (rad), zero while the foot is flat

    Returns:
        AnkleOutput whose ankle angle is measured between the leg and the toe
        side of the foot: π/2 with a vertical leg on a flat foot, smaller in
        dorsiflexion, larger as the heel lifts
    """
    return AnkleOutput(
        torque=torque, ankle_angle=0.5 * math.pi - leg_angle + foot_angle, foot_angle=foot_angle
    )
