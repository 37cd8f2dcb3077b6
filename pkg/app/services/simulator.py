"""Hybrid execution of the walker: per-phase dynamics, guards and resets."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from app.models.params import ModelParams, SimulationOptions, SubphaseId
from app.models.state import LegId, LegRole, LegState, PhaseId, WalkerState, phase_from_roles
from app.models.trace import EventKind, EventRecord, FallMarker, GaitTrace, TraceRecorder
from app.services.events import EventSpec, active_events, lookup_transition
from app.services.gains import ZERO_GAINS, Gains, blend_gains, gains_at, subphase_of
from app.services.gait_control import clock_phase, placement_target, signed_clock_phase
from app.services.integrator import EventIntegrator, Residual, RightHandSide
from app.services.mechanics import (
    AnkleOutput,
    LegGeometry,
    ankle_output,
    axial_force_raw,
    flatfoot_ankle_torque,
    flatfoot_contact_forces,
    leg_force_on_mass,
    leg_geometry,
    pushoff_ankle_torque,
    pushoff_toe_force,
)
from app.services.trajectories import (
    leg_length_reference,
    pushoff_foot_angle,
    swing_heel_reference,
)
from app.utils.exceptions import (
    MechanicsError,
    ParameterError,
    SimulationError,
    TransitionError,
)
from app.utils.validators import validate_params

logger = logging.getLogger(__name__)

LEGS: Tuple[LegId, LegId] = (LegId.LEFT, LegId.RIGHT)


@dataclass(frozen=True)
class LegSample:
    """Every derived quantity of one leg at one instant."""

    role: LegRole
    geometry: LegGeometry
    length_ref: float
    length_ref_rate: float
    gains: Gains
    force_raw: float
    force: float
    ankle: AnkleOutput
    heel_force: float
    toe_force: float
    heel_force_raw: float
    toe_force_raw: float
    heel: Tuple[float, float]
    heel_velocity: Tuple[float, float]
    toe: Tuple[float, float]
    target: float
    force_on_mass: Tuple[float, float]

    @property
    def in_contact(self) -> bool:
        return self.role is not LegRole.SWING

    @property
    def torque(self) -> float:
        return self.ankle.torque


@dataclass(frozen=True)
class StateDerivative:
    """Time derivative of the continuous state."""

    velocity: Tuple[float, float]
    acceleration: Tuple[float, float]
    heel_velocity: Dict[LegId, Tuple[float, float]]

    def as_vector(self) -> np.ndarray:
        return np.array([*self.velocity, *self.acceleration])


class WalkerSimulator:
    """Integrates the hybrid walking model for one parameter set."""

    def __init__(self, params: ModelParams, options: Optional[SimulationOptions] = None):
        """
        Initialize the simulator.

        Args:
            params: Model parameters
            options: Integration tolerances and trace spacing

        Raises:
            ParameterError: If the parameters violate their invariants
        """
        violations = validate_params(params)
        if violations:
            raise ParameterError("Invalid model parameters: " + "; ".join(violations))
        self.params = params
        self.options = options or SimulationOptions()
        self._gains = {sub: gains_at(sub, None, params) for sub in SubphaseId}

    # ------------------------------------------------------------ leg model

    def flat_gains(self, leg: LegState, t: float, phase: PhaseId) -> Gains:
        """Gains of a flat-foot leg, blended around the TD→SS boundary when configured."""
        p = self.params
        t_switch = leg.stride_start + p.td_subphase_fraction * p.stride_period
        window = p.gain_blend_window
        if window > 0.0 and abs(t - t_switch) < 0.5 * window:
            weight = (t - t_switch + 0.5 * window) / window
            return blend_gains(self._gains[SubphaseId.TD], self._gains[SubphaseId.SS], weight)
        if leg.td_subphase_done:
            return self._gains[SubphaseId.SS]
        fraction = (t - leg.stride_start) / p.stride_period
        return self._gains[subphase_of(fraction, phase, p, LegRole.FLAT)]

    def sample_leg(
        self,
        leg_id: LegId,
        leg: LegState,
        phase: PhaseId,
        t: float,
        mass: Sequence[float],
    ) -> LegSample:
        """
        Evaluate one leg at a mass state ``(x, y, vx, vy)``.

        Raises:
            MechanicsError: If the leg geometry or push-off torque is degenerate
        """
        p = self.params
        pos, vel = (mass[0], mass[1]), (mass[2], mass[3])
        l_d, l_d_rate = leg_length_reference(
            clock_phase(t, leg_id, p.stride_clock, p.stride_period), p
        )
        target = placement_target(vel[0], p.placement_law)
        foot = p.foot_length if p.ankle_enabled else 0.0

        if leg.role is LegRole.SWING:
            duration = leg.swing_end - leg.swing_start
            s = (t - leg.swing_start) / duration
            (rx, hy), (drx, dhy) = swing_heel_reference(
                s, leg.swing_start_rel, (target, 0.0), p.swing_clearance, extrapolate=True
            )
            heel = (pos[0] + rx, hy)
            heel_vel = (vel[0] + drx / duration, dhy / duration)
            geom = leg_geometry(pos, vel, heel, heel_vel)
            return LegSample(
                role=leg.role,
                geometry=geom,
                length_ref=l_d,
                length_ref_rate=l_d_rate,
                gains=ZERO_GAINS,
                force_raw=0.0,
                force=0.0,
                ankle=ankle_output(0.0, geom.angle, 0.0),
                heel_force=0.0,
                toe_force=0.0,
                heel_force_raw=0.0,
                toe_force_raw=0.0,
                heel=heel,
                heel_velocity=heel_vel,
                toe=(heel[0] + foot, hy),
                target=target,
                force_on_mass=(0.0, 0.0),
            )

        if leg.role is LegRole.FLAT:
            heel = (leg.heel[0], 0.0)
            geom = leg_geometry(pos, vel, heel)
            gains = self.flat_gains(leg, t, phase)
            raw = axial_force_raw(gains.k, gains.b, l_d, l_d_rate, geom.length, geom.length_rate)
            force = max(0.0, raw)
            if p.ankle_enabled:
                neutral = (
                    leg.touchdown_angle
                    if p.ankle_neutral_angle is None
                    else p.ankle_neutral_angle
                )
                torque = flatfoot_ankle_torque(geom.angle, neutral, gains.k_a)
                contact = flatfoot_contact_forces(force, -geom.angle, geom.length, foot, torque)
                heel_raw = flatfoot_contact_forces(
                    raw, -geom.angle, geom.length, foot, torque
                ).heel
                heel_force, toe_force, toe_raw = contact.heel, contact.toe, contact.toe
            else:
                torque = 0.0
                heel_force = force * math.cos(geom.angle)
                heel_raw = toe_raw = raw * math.cos(geom.angle)
                toe_force = 0.0
            return LegSample(
                role=leg.role,
                geometry=geom,
                length_ref=l_d,
                length_ref_rate=l_d_rate,
                gains=gains,
                force_raw=raw,
                force=force,
                ankle=ankle_output(torque, geom.angle, 0.0),
                heel_force=heel_force,
                toe_force=toe_force,
                heel_force_raw=heel_raw,
                toe_force_raw=toe_raw,
                heel=heel,
                heel_velocity=(0.0, 0.0),
                toe=(heel[0] + foot, 0.0),
                target=target,
                force_on_mass=leg_force_on_mass(force, torque, geom),
            )

        # Push-off: the toe is pinned and the heel lifts along the feed-forward angle.
        start = leg.pushoff_start if leg.pushoff_start is not None else t
        lift, lift_rate = pushoff_foot_angle(t - start, p)
        ankle = (leg.toe_x - foot * math.cos(lift), foot * math.sin(lift))
        ankle_vel = (foot * math.sin(lift) * lift_rate, foot * math.cos(lift) * lift_rate)
        geom = leg_geometry(pos, vel, ankle, ankle_vel)
        gains = self._gains[SubphaseId.PO]
        raw = axial_force_raw(gains.k, gains.b, l_d, l_d_rate, geom.length, geom.length_rate)
        force = max(0.0, raw)
        torque = pushoff_ankle_torque(force, -geom.angle, lift, geom.length, foot)
        torque_raw = pushoff_ankle_torque(raw, -geom.angle, lift, geom.length, foot)
        return LegSample(
            role=leg.role,
            geometry=geom,
            length_ref=l_d,
            length_ref_rate=l_d_rate,
            gains=gains,
            force_raw=raw,
            force=force,
            ankle=ankle_output(torque, geom.angle, lift),
            heel_force=0.0,
            toe_force=pushoff_toe_force(force, -geom.angle, torque, geom.length),
            heel_force_raw=0.0,
            toe_force_raw=pushoff_toe_force(raw, -geom.angle, torque_raw, geom.length),
            heel=ankle,
            heel_velocity=ankle_vel,
            toe=(leg.toe_x, 0.0),
            target=target,
            force_on_mass=leg_force_on_mass(force, torque, geom),
        )

    def sample_legs(self, state: WalkerState) -> Dict[LegId, LegSample]:
        mass = state.mass_vector()
        return {
            leg: self.sample_leg(leg, state.legs[leg], state.phase, state.t, mass) for leg in LEGS
        }

    # ------------------------------------------------------------ dynamics

    def derivatives(self, state: WalkerState, t: Optional[float] = None) -> StateDerivative:
        """
        Time derivative of the continuous state.

        Args:
            state: Phase-consistent walker state
            t: Evaluation time; defaults to ``state.t``

        Raises:
            MechanicsError: If a contacting leg has degenerate geometry
        """
        t = state.t if t is None else t
        mass = state.mass_vector()
        fx = fy = 0.0
        heel_velocity: Dict[LegId, Tuple[float, float]] = {}
        for leg in LEGS:
            sample = self.sample_leg(leg, state.legs[leg], state.phase, t, mass)
            fx += sample.force_on_mass[0]
            fy += sample.force_on_mass[1]
            heel_velocity[leg] = sample.heel_velocity
        m = self.params.body_mass
        return StateDerivative(
            velocity=(state.vx, state.vy),
            acceleration=(fx / m, fy / m - self.params.gravity),
            heel_velocity=heel_velocity,
        )

    def _right_hand_side(self, state: WalkerState) -> RightHandSide:
        legs = [(leg, state.legs[leg]) for leg in LEGS]
        phase = state.phase
        m, g = self.params.body_mass, self.params.gravity

        def fun(t: float, y: np.ndarray) -> np.ndarray:
            fx = fy = 0.0
            for leg_id, leg in legs:
                if leg.role is LegRole.SWING:
                    continue
                force = self.sample_leg(leg_id, leg, phase, t, y).force_on_mass
                fx += force[0]
                fy += force[1]
            return np.array([y[2], y[3], fx / m, fy / m - g])

        return fun

    # ------------------------------------------------------------ events

    def residual(
        self, spec: EventSpec, state: WalkerState, t: float, mass: Sequence[float]
    ) -> float:
        """Guard value in natural units: forces over m·g, heights in m, times in s."""
        p = self.params
        if spec.kind is EventKind.FALL:
            return float(mass[1]) - p.fall_height
        assert spec.leg is not None
        leg = state.legs[spec.leg]
        if spec.kind is EventKind.GAIN_SWITCH:
            return leg.stride_start + p.td_subphase_fraction * p.stride_period - t
        sample = self.sample_leg(spec.leg, leg, state.phase, t, mass)
        if spec.kind is EventKind.HEEL_OFF:
            return sample.heel_force_raw / p.weight
        if spec.kind is EventKind.TOE_OFF:
            return sample.toe_force_raw / p.weight
        return sample.heel[1]

    def event_residuals(self, state: WalkerState) -> Dict[EventSpec, float]:
        """Residuals of every guard enabled in the current discrete state."""
        mass = state.mass_vector()
        return {
            spec: self.residual(spec, state, state.t, mass)
            for spec in active_events(state, self.params)
        }

    def _residual_fn(self, spec: EventSpec, state: WalkerState) -> Residual:
        def fn(t: float, y: np.ndarray) -> float:
            return self.residual(spec, state, t, y)

        return fn

    # ------------------------------------------------------------ transitions

    def swing_end_time(self, leg: LegId, t: float) -> float:
        """Next zero of the leg clock at least the minimum swing time after ``t``."""
        p = self.params
        period = p.stride_period
        t_end = t + (period - clock_phase(t, leg, p.stride_clock, period))
        while t_end - t < p.min_swing_fraction * period:
            t_end += period
        return t_end

    def apply_transition(self, state: WalkerState, spec: EventSpec) -> WalkerState:
        """
        Apply the reset of a fired guard.

        The mass position and velocity are never changed.

        Raises:
            TransitionError: If the phase has no edge for the event, the edge is
                terminal, or the resulting leg roles contradict the successor
        """
        transition = lookup_transition(state.phase, spec.kind)
        if transition.terminal or transition.successor is None:
            raise TransitionError(
                f"{spec.label} in {state.phase.value} ends the run: {transition.reason}",
                last_state=state,
            )
        p = self.params
        new = state.copy()
        t = new.t
        if spec.leg is not None:
            leg = new.legs[spec.leg]
            if spec.kind is EventKind.TOUCHDOWN:
                heel_x = new.x + placement_target(new.vx, p.placement_law)
                leg.role = LegRole.FLAT
                leg.heel = (heel_x, 0.0)
                leg.toe_x = heel_x + (p.foot_length if p.ankle_enabled else 0.0)
                leg.touchdown_angle = math.atan2(new.x - heel_x, new.y)
                leg.stride_start = t - signed_clock_phase(
                    t, spec.leg, p.stride_clock, p.stride_period
                )
                leg.td_subphase_done = (
                    t >= leg.stride_start + p.td_subphase_fraction * p.stride_period
                )
                leg.pushoff_start = None
            elif spec.kind is EventKind.HEEL_OFF:
                leg.role = LegRole.PUSHOFF
                leg.toe_x = leg.heel[0] + p.foot_length
                leg.pushoff_start = t
            elif spec.kind is EventKind.TOE_OFF:
                heel = self.sample_leg(
                    spec.leg, state.legs[spec.leg], state.phase, t, state.mass_vector()
                ).heel
                leg.role = LegRole.SWING
                leg.heel = heel
                leg.swing_start = t
                leg.swing_end = self.swing_end_time(spec.leg, t)
                leg.swing_start_rel = (heel[0] - new.x, heel[1])
                leg.pushoff_start = None
            elif spec.kind is EventKind.GAIN_SWITCH:
                leg.td_subphase_done = True

        new.phase = transition.successor
        implied = phase_from_roles(new.leg_roles)
        if implied is not new.phase:
            raise TransitionError(
                f"{spec.label} leaves roles {new.leg_roles} inconsistent with {new.phase.value}",
                last_state=state,
            )
        return new

    # ------------------------------------------------------------ execution

    def check_consistency(self, state: WalkerState) -> None:
        """
        Raises:
            SimulationError: If the leg roles do not imply the stored phase
        """
        if set(state.legs) != set(LEGS):
            raise SimulationError("State must describe both legs", last_state=state)
        implied = phase_from_roles(state.leg_roles)
        if implied is not state.phase:
            raise SimulationError(
                f"Leg roles imply {implied.value if implied else 'no phase'}, "
                f"state says {state.phase.value}",
                last_state=state,
            )
        if state.y <= 0.0:
            raise SimulationError("Mass must start above the ground", last_state=state)

    def row(self, state: WalkerState, label: str = "") -> List[object]:
        """One trace row in the fixed column order."""
        values: List[object] = [state.t, state.x, state.y, state.vx, state.vy, state.phase.value]
        for leg, s in self.sample_legs(state).items():
            values.extend(
                [
                    s.geometry.length,
                    s.length_ref,
                    s.force,
                    s.geometry.angle,
                    s.torque,
                    s.heel_force,
                    s.toe_force,
                    s.heel[0],
                    s.heel[1],
                    s.toe[0],
                    s.toe[1],
                    s.gains.k,
                    s.gains.b,
                    s.gains.k_a,
                    s.target,
                    s.ankle.ankle_angle,
                    s.ankle.foot_angle,
                ]
            )
        values.append(label)
        return values

    def simulate(
        self,
        init: WalkerState,
        t_end: float,
        stop_at: Optional[Tuple[EventKind, Optional[LegId]]] = None,
    ) -> GaitTrace:
        """
        Run the hybrid system from ``init`` until ``t_end`` or a fall.

        Args:
            init: Phase-consistent initial state
            t_end: Final time (s)
            stop_at: Also stop right after the first event of this kind and leg

        Returns:
            GaitTrace; ``trace.fall`` is set when the run ended early

        Raises:
            SimulationError: If integration fails (carries the last valid state)
        """
        self.check_consistency(init)
        recorder = TraceRecorder()
        state = init.copy()
        recorder.add_row(self.row(state))
        if t_end <= state.t:
            return recorder.build(final_state=state)

        level = logging.DEBUG if stop_at else logging.INFO
        logger.log(
            level,
            "Simulating %.2f s from t=%.3f s in %s",
            t_end - state.t,
            state.t,
            state.phase.value,
        )
        grid = _SampleGrid(state.t, self.options.log_interval)
        finished = False
        while not finished and state.t < t_end:
            state, finished = self._run_mode(state, t_end, recorder, grid, stop_at)

        if recorder.fall is not None:
            logger.warning("Walker fell at t=%.3f s: %s", recorder.fall.t, recorder.fall.reason)
        else:
            logger.log(level, "Reached t=%.3f s with %d events", state.t, len(recorder.events))
        return recorder.build(final_state=state)

    def _run_mode(
        self,
        state: WalkerState,
        t_end: float,
        recorder: TraceRecorder,
        grid: "_SampleGrid",
        stop_at: Optional[Tuple[EventKind, Optional[LegId]]] = None,
    ) -> Tuple[WalkerState, bool]:
        specs = active_events(state, self.params)
        try:
            integrator = EventIntegrator(
                self._right_hand_side(state),
                state.t,
                state.mass_vector(),
                t_end,
                [self._residual_fn(spec, state) for spec in specs],
                [spec.direction for spec in specs],
                self.options,
            )
        except MechanicsError as exc:
            raise SimulationError(str(exc), last_state=state) from exc

        while True:
            t_last = recorder.last_time if recorder.last_time is not None else state.t
            try:
                outcome = integrator.step()
            except MechanicsError as exc:
                last = _at(state, integrator.t, integrator.y)
                raise SimulationError(str(exc), last_state=last) from exc
            except SimulationError as exc:
                exc.last_state = _at(state, integrator.t, integrator.y)
                raise

            for t in grid.between(max(t_last, outcome.t_old), outcome.t, closed=not outcome.fired):
                moved = _at(state, t, outcome.dense(t))
                recorder.add_row(self.row(moved))

            if outcome.fired:
                assert outcome.event_index is not None
                spec = specs[outcome.event_index]
                after, done = self._fire(
                    state, spec, outcome.t, outcome.y, outcome.residual, recorder
                )
                return after, done or (stop_at is not None and stop_at == (spec.kind, spec.leg))

            if integrator.finished:
                final = _at(state, outcome.t, outcome.y)
                recorder.add_row(self.row(final))
                return final, True

    def _fire(
        self,
        state: WalkerState,
        spec: EventSpec,
        t: float,
        y: np.ndarray,
        residual: float,
        recorder: TraceRecorder,
    ) -> Tuple[WalkerState, bool]:
        before = _at(state, t, y)
        transition = lookup_transition(before.phase, spec.kind)
        if transition.terminal:
            recorder.add_row(self.row(before, spec.label))
            recorder.add_event(
                EventRecord(
                    t=t,
                    kind=spec.kind,
                    leg=spec.leg,
                    residual=residual,
                    phase_before=before.phase,
                    phase_after=None,
                    state_before=before,
                )
            )
            recorder.fall = FallMarker(t=t, reason=transition.reason)
            return before, True

        after = self.apply_transition(before, spec)
        recorder.add_row(self.row(after, spec.label))
        recorder.add_event(
            EventRecord(
                t=t,
                kind=spec.kind,
                leg=spec.leg,
                residual=residual,
                phase_before=before.phase,
                phase_after=after.phase,
                state_before=before,
                state_after=after.copy(),
            )
        )
        logger.debug(
            "%s at t=%.9f s (%s -> %s, residual %.2e)",
            spec.label,
            t,
            before.phase.value,
            after.phase.value,
            residual,
        )
        return after, False

    # ------------------------------------------------------------ initial state

    def nominal_initial_state(self, speed: Optional[float] = None) -> WalkerState:
        """
        Mid-stance single support on the left leg.

        The left leg is vertical at clock phase T/4 with its static compression
        under the stance stiffness. The right leg lifted off half a period
        before its next touchdown, pivoting on its toe at the push-off angle
        from a foothold placed by the law half a period before that.

        Args:
            speed: Horizontal speed; defaults to ``initial_speed`` or ``v_ref``
        """
        p = self.params
        period = p.stride_period
        if speed is not None:
            v = speed
        elif p.initial_speed is not None:
            v = p.initial_speed
        else:
            v = p.placement_law.v_ref
        height = p.rest_leg_length - p.weight / p.leg_schedule.k_ss
        t0 = (0.25 * period - p.stride_clock.offset(LegId.LEFT.value, period)) % period
        target = placement_target(v, p.placement_law)
        reach = min(abs(target) / p.rest_leg_length, 1.0)
        foot = p.foot_length if p.ankle_enabled else 0.0

        left = LegState(
            role=LegRole.FLAT,
            heel=(0.0, 0.0),
            toe_x=foot,
            touchdown_angle=-math.asin(reach),
            stride_start=t0 - 0.25 * period,
            td_subphase_done=True,
        )
        swing_end = self.swing_end_time(LegId.RIGHT, t0)
        lift = (foot * (1.0 - math.cos(p.pushoff_angle)), foot * math.sin(p.pushoff_angle))
        right = LegState(
            role=LegRole.SWING,
            swing_start=swing_end - 0.5 * period,
            swing_end=swing_end,
            swing_start_rel=(target - 0.5 * v * period + lift[0], lift[1]),
        )
        return WalkerState(
            x=0.0,
            y=height,
            vx=v,
            vy=0.0,
            t=t0,
            phase=PhaseId.SINGLE_SUPPORT,
            legs={LegId.LEFT: left, LegId.RIGHT: right},
        )


class _SampleGrid:
    """Uniform logging instants ``origin + n·dt``."""

    def __init__(self, origin: float, dt: float):
        self.origin = origin
        self.dt = dt

    def between(self, t_lo: float, t_hi: float, closed: bool) -> List[float]:
        """Grid instants in ``(t_lo, t_hi)``, or ``(t_lo, t_hi]`` when closed."""
        n = max(int(math.floor((t_lo - self.origin) / self.dt)), 0)
        times = []
        while True:
            t = self.origin + n * self.dt
            if t > t_hi or (t == t_hi and not closed):
                break
            if t > t_lo:
                times.append(t)
            n += 1
        return times


def _at(state: WalkerState, t: float, y: Sequence[float]) -> WalkerState:
    """Shallow view of ``state`` moved to a new continuous state."""
    return WalkerState(
        x=float(y[0]),
        y=float(y[1]),
        vx=float(y[2]),
        vy=float(y[3]),
        t=float(t),
        phase=state.phase,
        legs=state.legs,
    )


# ---------------------------------------------------------------- functional API


def derivatives(state: WalkerState, t: float, params: ModelParams) -> StateDerivative:
    return WalkerSimulator(params).derivatives(state, t)


def event_residuals(state: WalkerState, params: ModelParams) -> Dict[EventSpec, float]:
    return WalkerSimulator(params).event_residuals(state)


def apply_transition(state: WalkerState, event: EventSpec, params: ModelParams) -> WalkerState:
    return WalkerSimulator(params).apply_transition(state, event)


def simulate(
    params: ModelParams,
    init: WalkerState,
    t_end: float,
    options: Optional[SimulationOptions] = None,
    stop_at: Optional[Tuple[EventKind, Optional[LegId]]] = None,
) -> GaitTrace:
    """Run one simulation; see :meth:`WalkerSimulator.simulate`."""
    return WalkerSimulator(params, options).simulate(init, t_end, stop_at)


def nominal_initial_state(params: ModelParams, speed: Optional[float] = None) -> WalkerState:
    return WalkerSimulator(params).nominal_initial_state(speed)
