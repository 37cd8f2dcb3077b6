"""Input validation utilities."""

from __future__ import annotations

import math
import re
from typing import TYPE_CHECKING, List

if TYPE_CHECKING:
    from app.models.params import ModelParams

_FRACTION_PATTERN = re.compile(
    r"^\s*(?P<value>[-+]?\d+(?:\.\d*)?|\.\d+)\s*%\s*(?:of\s+(?P<ref>[A-Za-z0-9_]+))?\s*$"
)


def parse_fraction_of(text: str, reference: float, reference_name: str) -> float:
    """
    Resolve a percentage shorthand against a reference quantity.

    Args:
        text: Shorthand such as ``"20%"`` or ``"20% of T"``
        reference: Value the percentage applies to
        reference_name: Accepted name after ``of`` (e.g. ``"T"``)

    Returns:
        The resolved absolute value

    Raises:
        ValueError: If the text is not a percentage of ``reference_name``
    """
    match = _FRACTION_PATTERN.match(text)
    if not match:
        raise ValueError(f"Cannot parse '{text}' as a percentage of {reference_name}")
    ref = match.group("ref")
    if ref is not None and ref != reference_name:
        raise ValueError(f"'{text}' must be expressed as a percentage of {reference_name}")
    return float(match.group("value")) / 100.0 * reference


def validate_params(params: "ModelParams") -> List[str]:
    """
    List every violated parameter invariant.

    Args:
        params: Model parameters to check

    Returns:
        Human-readable violations; empty when the parameters are admissible
    """
    violations: List[str] = []

    def require(condition: bool, message: str) -> None:
        if not condition:
            violations.append(message)

    p = params
    require(p.body_mass > 0, "body mass must be positive")
    require(p.rest_leg_length > 0, "rest leg length must be positive")
    require(p.stride_period > 0, "stride period must be positive")
    require(p.gravity > 0, "gravity must be positive")

    if p.ankle_enabled:
        require(p.foot_length > 0, "foot length must be positive")
        require(
            p.foot_length < p.rest_leg_length,
            "foot length must be shorter than the rest leg length",
        )
        require(
            0 < p.pushoff_angle < math.pi / 2,
            "push-off angle must lie strictly between 0 and 90 deg",
        )
        require(p.pushoff_duration > 0, "push-off duration must be positive")
        require(p.pushoff_duration < p.stride_period, "push-off duration exceeds stride")

    require(
        0 < p.retraction_amplitude < p.rest_leg_length,
        "retraction amplitude must lie between 0 and the rest leg length",
    )
    require(
        0 < p.td_subphase_fraction < 0.5, "touchdown subphase fraction must lie between 0 and 0.5"
    )
    require(p.swing_clearance > 0, "swing clearance must be positive")
    require(p.gain_blend_window >= 0, "gain blend window must be non-negative")
    require(0 < p.fall_height_fraction < 1, "fall height fraction must lie between 0 and 1")
    require(0 < p.min_swing_fraction < 0.5, "minimum swing fraction must lie between 0 and 0.5")
    if p.initial_speed is not None:
        require(p.initial_speed > 0, "initial speed must be positive")

    s = p.leg_schedule
    for name, k in (("touchdown", s.k_td), ("stance", s.k_ss), ("push-off", s.k_po)):
        require(k > 0, f"leg stiffness at {name} must be positive")
    for name, zeta in (("touchdown", s.zeta_td), ("stance", s.zeta_ss), ("push-off", s.zeta_po)):
        require(0 <= zeta <= 1, f"leg damping ratio at {name} must lie in [0, 1]")

    a = p.ankle_schedule
    require(a.ka_td > 0, "ankle stiffness at touchdown must be positive")
    require(a.ka_ss > 0, "ankle stiffness during stance must be positive")

    law = p.placement_law
    require(law.v_ref >= 0, "reference speed must be non-negative")
    return violations
