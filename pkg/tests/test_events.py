import pytest

from app.models.state import LegId, LegRole, LegState, PhaseId, WalkerState
from app.models.trace import EventKind
from app.services.events import FALLING, RISING, active_events, crossed, lookup_transition
from app.utils.exceptions import TransitionError


def _state(left: LegRole, right: LegRole, phase: PhaseId) -> WalkerState:
    return WalkerState(
        x=0.0,
        y=0.95,
        vx=1.2,
        vy=0.0,
        t=0.0,
        phase=phase,
        legs={LegId.LEFT: LegState(role=left), LegId.RIGHT: LegState(role=right)},
    )


class TestTransitionTable:
    @pytest.mark.parametrize(
        "phase,kind,successor",
        [
            (PhaseId.SINGLE_SUPPORT, EventKind.HEEL_OFF, PhaseId.SINGLE_SUPPORT_PUSHOFF),
            (PhaseId.SINGLE_SUPPORT_PUSHOFF, EventKind.TOUCHDOWN, PhaseId.DOUBLE_SUPPORT_PUSHOFF),
            (PhaseId.DOUBLE_SUPPORT_PUSHOFF, EventKind.TOE_OFF, PhaseId.SINGLE_SUPPORT),
            (PhaseId.DOUBLE_SUPPORT, EventKind.HEEL_OFF, PhaseId.DOUBLE_SUPPORT_PUSHOFF),
            (PhaseId.SINGLE_SUPPORT, EventKind.TOUCHDOWN, PhaseId.DOUBLE_SUPPORT),
        ],
    )
    def test_walking_edges(self, phase, kind, successor):
        assert lookup_transition(phase, kind).successor is successor

    @pytest.mark.parametrize(
        "phase,kind",
        [
            (PhaseId.SINGLE_SUPPORT_PUSHOFF, EventKind.TOE_OFF),
            (PhaseId.DOUBLE_SUPPORT_PUSHOFF, EventKind.HEEL_OFF),
            (PhaseId.SINGLE_SUPPORT, EventKind.FALL),
            (PhaseId.DOUBLE_SUPPORT, EventKind.FALL),
        ],
    )
    def test_terminal_edges(self, phase, kind):
        transition = lookup_transition(phase, kind)
        assert transition.terminal
        assert transition.reason

    def test_gain_switch_keeps_phase(self):
        for phase in PhaseId:
            assert lookup_transition(phase, EventKind.GAIN_SWITCH).successor is phase

    def test_unknown_pair(self):
        with pytest.raises(TransitionError):
            lookup_transition(PhaseId.DOUBLE_SUPPORT, EventKind.TOUCHDOWN)


class TestCrossed:
    def test_falling_crossing(self):
        assert crossed(FALLING, 0.1, -0.1)
        assert not crossed(FALLING, -0.1, 0.1)

    def test_rising_crossing(self):
        assert crossed(RISING, -0.1, 0.1)

    def test_tangency_does_not_fire(self):
        assert not crossed(FALLING, 0.0, 0.0)
        assert not crossed(FALLING, 0.1, 0.05)
        assert not crossed(FALLING, 0.0, 0.1)

    def test_landing_on_zero(self):
        assert crossed(FALLING, 0.1, 0.0)


class TestActiveEvents:
    def test_single_support_with_ankle(self, params):
        state = _state(LegRole.FLAT, LegRole.SWING, PhaseId.SINGLE_SUPPORT)
        kinds = {(s.kind, s.leg) for s in active_events(state, params)}
        assert (EventKind.FALL, None) in kinds
        assert (EventKind.HEEL_OFF, LegId.LEFT) in kinds
        assert (EventKind.GAIN_SWITCH, LegId.LEFT) in kinds
        assert (EventKind.TOUCHDOWN, LegId.RIGHT) in kinds

    def test_point_foot_flat_leg_lifts_off_directly(self, params):
        state = _state(LegRole.FLAT, LegRole.SWING, PhaseId.SINGLE_SUPPORT)
        kinds = {(s.kind, s.leg) for s in active_events(state, params.point_foot())}
        assert (EventKind.TOE_OFF, LegId.LEFT) in kinds
        assert (EventKind.HEEL_OFF, LegId.LEFT) not in kinds

    def test_pushoff_leg_waits_for_toe_off(self, params):
        state = _state(LegRole.PUSHOFF, LegRole.FLAT, PhaseId.DOUBLE_SUPPORT_PUSHOFF)
        state.legs[LegId.RIGHT].td_subphase_done = True
        kinds = {(s.kind, s.leg) for s in active_events(state, params)}
        assert kinds == {
            (EventKind.FALL, None),
            (EventKind.TOE_OFF, LegId.LEFT),
            (EventKind.HEEL_OFF, LegId.RIGHT),
        }

    def test_all_guards_fire_downward(self, params):
        state = _state(LegRole.FLAT, LegRole.FLAT, PhaseId.DOUBLE_SUPPORT)
        assert all(s.direction == FALLING for s in active_events(state, params))
