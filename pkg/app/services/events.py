"""Event specifications and the phase transition table of the walking FSM."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from app.models.params import ModelParams
from app.models.state import LegId, LegRole, PhaseId, WalkerState
from app.models.trace import EventKind
from app.utils.exceptions import TransitionError

FALLING = -1
RISING = 1
EITHER = 0


@dataclass(frozen=True)
class EventSpec:
    """One guard of the hybrid system.

    ``direction`` selects the crossing that fires: -1 for positive to
    negative, +1 for negative to positive, 0 for both.
    """

    kind: EventKind
    leg: Optional[LegId] = None
    direction: int = FALLING

    @property
    def label(self) -> str:
        return self.kind.value if self.leg is None else f"{self.kind.value}({self.leg.value})"


@dataclass(frozen=True)
class Transition:
    """Edge of the transition table; ``successor`` is None for terminal edges."""

    successor: Optional[PhaseId]
    reason: str = ""

    @property
    def terminal(self) -> bool:
        return self.successor is None


DS = PhaseId.DOUBLE_SUPPORT
SS = PhaseId.SINGLE_SUPPORT
SSPO = PhaseId.SINGLE_SUPPORT_PUSHOFF
DSPO = PhaseId.DOUBLE_SUPPORT_PUSHOFF

TRANSITION_TABLE: Dict[Tuple[PhaseId, EventKind], Transition] = {
    (DS, EventKind.HEEL_OFF): Transition(DSPO),
    (SS, EventKind.HEEL_OFF): Transition(SSPO),
    (SS, EventKind.TOUCHDOWN): Transition(DS),
    (SSPO, EventKind.TOUCHDOWN): Transition(DSPO),
    (DSPO, EventKind.TOE_OFF): Transition(SS),
    # Point-foot take-off of the trailing leg.
    (DS, EventKind.TOE_OFF): Transition(SS),
    (SSPO, EventKind.TOE_OFF): Transition(None, "toe-off with no foot on the ground (flight)"),
    (SS, EventKind.TOE_OFF): Transition(None, "take-off with no foot on the ground (flight)"),
    (DSPO, EventKind.HEEL_OFF): Transition(
        None, "heel-off of the leading foot (both feet on toes)"
    ),
    (DS, EventKind.GAIN_SWITCH): Transition(DS),
    (SS, EventKind.GAIN_SWITCH): Transition(SS),
    (SSPO, EventKind.GAIN_SWITCH): Transition(SSPO),
    (DSPO, EventKind.GAIN_SWITCH): Transition(DSPO),
}
for _phase in PhaseId:
    TRANSITION_TABLE[(_phase, EventKind.FALL)] = Transition(None, "mass below fall height")


def lookup_transition(phase: PhaseId, kind: EventKind) -> Transition:
    """
    Edge fired by an event in a phase.

    Raises:
        TransitionError: If the table has no edge for the pair
    """
    try:
        return TRANSITION_TABLE[(phase, kind)]
    except KeyError:
        raise TransitionError(f"No transition for {kind.value} in phase {phase.value}") from None


def active_events(state: WalkerState, params: ModelParams) -> List[EventSpec]:
    """Guards enabled in the current discrete state, in a fixed order."""
    specs: List[EventSpec] = [EventSpec(EventKind.FALL)]
    for leg in (LegId.LEFT, LegId.RIGHT):
        leg_state = state.legs[leg]
        if leg_state.role is LegRole.FLAT:
            if params.ankle_enabled:
                specs.append(EventSpec(EventKind.HEEL_OFF, leg))
            else:
                specs.append(EventSpec(EventKind.TOE_OFF, leg))
            if not leg_state.td_subphase_done:
                specs.append(EventSpec(EventKind.GAIN_SWITCH, leg))
        elif leg_state.role is LegRole.PUSHOFF:
            specs.append(EventSpec(EventKind.TOE_OFF, leg))
        else:
            specs.append(EventSpec(EventKind.TOUCHDOWN, leg))
    return specs


def crossed(direction: int, before: float, after: float) -> bool:
    """Transversal crossing test; a residual that only touches zero does not fire."""
    if direction <= 0 and before > 0.0 and after < 0.0:
        return True
    if direction >= 0 and before < 0.0 and after > 0.0:
        return True
    # Landing exactly on zero counts as a crossing from the strict side.
    if after == 0.0 and before != 0.0:
        return (direction <= 0 and before > 0.0) or (direction >= 0 and before < 0.0)
    return False
