"""Hybrid state of the walker: continuous mass state plus discrete leg roles."""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Tuple


class PhaseId(str, Enum):
    """The four discrete walking modes."""

    DOUBLE_SUPPORT = "DS"
    SINGLE_SUPPORT = "SS"
    SINGLE_SUPPORT_PUSHOFF = "SSPO"
    DOUBLE_SUPPORT_PUSHOFF = "DSPO"

    @property
    def is_pushoff(self) -> bool:
        return self in (PhaseId.SINGLE_SUPPORT_PUSHOFF, PhaseId.DOUBLE_SUPPORT_PUSHOFF)


class LegId(str, Enum):
    LEFT = "l"
    RIGHT = "r"

    @property
    def other(self) -> "LegId":
        return LegId.RIGHT if self is LegId.LEFT else LegId.LEFT


class LegRole(str, Enum):
    """Contact mode of one leg."""

    FLAT = "flat"  # heel and toe on the ground
    PUSHOFF = "pushoff"  # heel off, toe on the ground
    SWING = "swing"


@dataclass
class LegState:
    """Discrete bookkeeping for one leg.

    Anchors are only meaningful for the roles that use them: ``heel`` while
    flat, ``toe_x`` while pushing off, the swing fields while swinging.
    """

    role: LegRole
    heel: Tuple[float, float] = (0.0, 0.0)
    toe_x: float = 0.0
    touchdown_angle: float = 0.0
    stride_start: float = 0.0
    td_subphase_done: bool = False
    pushoff_start: Optional[float] = None
    swing_start: float = 0.0
    swing_end: float = 0.0
    swing_start_rel: Tuple[float, float] = (0.0, 0.0)


@dataclass
class WalkerState:
    """Full configuration of the hybrid system."""

    x: float
    y: float
    vx: float
    vy: float
    t: float
    phase: PhaseId
    legs: Dict[LegId, LegState] = field(default_factory=dict)

    @property
    def mass_pos(self) -> Tuple[float, float]:
        return (self.x, self.y)

    @property
    def mass_vel(self) -> Tuple[float, float]:
        return (self.vx, self.vy)

    @property
    def leg_roles(self) -> Dict[LegId, LegRole]:
        return {leg: s.role for leg, s in self.legs.items()}

    def mass_vector(self) -> Tuple[float, float, float, float]:
        return (self.x, self.y, self.vx, self.vy)

    def with_mass(self, x: float, y: float, vx: float, vy: float, t: float) -> "WalkerState":
        """Copy with a new continuous state and the same discrete state."""
        clone = self.copy()
        clone.x, clone.y, clone.vx, clone.vy, clone.t = x, y, vx, vy, t
        return clone

    def copy(self) -> "WalkerState":
        return copy.deepcopy(self)


def phase_from_roles(roles: Dict[LegId, LegRole]) -> Optional[PhaseId]:
    """Phase implied by the leg roles, or ``None`` for unsupported combinations."""
    counts = {role: sum(1 for r in roles.values() if r is role) for role in LegRole}
    if counts[LegRole.FLAT] == 2:
        return PhaseId.DOUBLE_SUPPORT
    if counts[LegRole.FLAT] == 1 and counts[LegRole.SWING] == 1:
        return PhaseId.SINGLE_SUPPORT
    if counts[LegRole.PUSHOFF] == 1 and counts[LegRole.SWING] == 1:
        return PhaseId.SINGLE_SUPPORT_PUSHOFF
    if counts[LegRole.FLAT] == 1 and counts[LegRole.PUSHOFF] == 1:
        return PhaseId.DOUBLE_SUPPORT_PUSHOFF
    return None
