"""Stride-to-stride return map and numerical limit-cycle stability."""

from __future__ import annotations

import logging
import math
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from app.models.metrics import ReturnMapResult
from app.models.params import ModelParams, SimulationOptions
from app.models.state import LegId, LegRole, WalkerState
from app.models.trace import EventKind, GaitTrace
from app.services.gait_control import signed_clock_phase
from app.services.simulator import WalkerSimulator
from app.utils.exceptions import AnalysisError, ConfigurationError, SimulationError

logger = logging.getLogger(__name__)

SECTION_COORDINATES: List[str] = ["vx", "vy", "y", "heel_offset", "clock_residual"]

DEFAULT_DAMPING = 0.8
DEFAULT_MAX_ITERATIONS = 60
DEFAULT_TOLERANCE = 1e-8
DEFAULT_STEP = 1e-6
# Strides simulated before the section template is taken.
DEFAULT_WARMUP_STRIDES = 20

StrideMap = Callable[[np.ndarray], np.ndarray]


def section_coordinates(
    state: WalkerState, params: ModelParams, leg: LegId = LegId.LEFT
) -> np.ndarray:
    """Reduced coordinates of a state sampled at a touchdown of ``leg``."""
    clock = signed_clock_phase(state.t, leg, params.stride_clock, params.stride_period)
    return np.array(
        [state.vx, state.vy, state.y, state.legs[leg].heel[0] - state.x, clock], dtype=float
    )


def diverged(section: np.ndarray) -> bool:
    return bool(np.all(np.isnan(section)))


class ReturnMap:
    """
    Maps the section state at one touchdown of the reference leg to the next.

    The discrete part of the walker state (trailing-leg role and anchors) is
    taken from a template sampled on the converged gait; section coordinates
    overwrite the mass state, the stance-heel offset and the clock alignment.
    """

    def __init__(
        self,
        params: ModelParams,
        template: WalkerState,
        options: Optional[SimulationOptions] = None,
        leg: LegId = LegId.LEFT,
    ):
        if template.legs[leg].role is not LegRole.FLAT:
            raise AnalysisError(f"Template must be sampled at a {leg.value}-leg touchdown")
        self.params = params
        self.template = template.copy()
        self.leg = leg
        self.simulator = WalkerSimulator(params, options)

    @classmethod
    def from_trace(
        cls,
        params: ModelParams,
        trace: GaitTrace,
        options: Optional[SimulationOptions] = None,
        leg: LegId = LegId.LEFT,
    ) -> "ReturnMap":
        """
        Raises:
            AnalysisError: If the trace has no touchdown of ``leg``
        """
        touchdowns = trace.events_of(EventKind.TOUCHDOWN, leg)
        if not touchdowns or touchdowns[-1].state_after is None:
            raise AnalysisError(f"Trace has no {leg.value}-leg touchdown to build a section from")
        return cls(params, touchdowns[-1].state_after, options, leg)

    @property
    def template_section(self) -> np.ndarray:
        return section_coordinates(self.template, self.params, self.leg)

    def reconstruct(self, section: Sequence[float]) -> WalkerState:
        """Walker state on the section with the given coordinates."""
        vx, vy, y, heel_offset, clock = (float(v) for v in section)
        p = self.params
        state = self.template.copy()
        base = state.t - signed_clock_phase(state.t, self.leg, p.stride_clock, p.stride_period)
        shift = base + clock - state.t

        state.vx, state.vy, state.y = vx, vy, y
        state.t += shift
        for leg_state in state.legs.values():
            leg_state.stride_start += shift
            leg_state.swing_start += shift
            if leg_state.pushoff_start is not None:
                leg_state.pushoff_start += shift
        for leg_id, leg_state in state.legs.items():
            if leg_state.role is LegRole.SWING:
                leg_state.swing_end = self.simulator.swing_end_time(leg_id, leg_state.swing_start)

        stance = state.legs[self.leg]
        heel_x = state.x + heel_offset
        stance.heel = (heel_x, 0.0)
        stance.toe_x = heel_x + (p.foot_length if p.ankle_enabled else 0.0)
        stance.touchdown_angle = math.atan2(state.x - heel_x, state.y)
        stance.td_subphase_done = (
            state.t >= stance.stride_start + p.td_subphase_fraction * p.stride_period
        )
        return state

    def __call__(self, section: Sequence[float]) -> np.ndarray:
        """Next section state, or an all-NaN vector when the stride fails."""
        nan = np.full(len(SECTION_COORDINATES), np.nan)
        try:
            state = self.reconstruct(section)
            horizon = state.t + 3.0 * self.params.stride_period
            trace = self.simulator.simulate(
                state, horizon, stop_at=(EventKind.TOUCHDOWN, self.leg)
            )
        except SimulationError as exc:
            logger.warning("Stride from %s failed: %s", np.round(section, 6), exc)
            return nan
        touchdowns = trace.events_of(EventKind.TOUCHDOWN, self.leg)
        if trace.fell or not touchdowns or touchdowns[-1].state_after is None:
            return nan
        return section_coordinates(touchdowns[-1].state_after, self.params, self.leg)


def return_map(
    params: ModelParams,
    section_state: Sequence[float],
    template: WalkerState,
    options: Optional[SimulationOptions] = None,
) -> np.ndarray:
    """Simulate one stride from a section state; see :class:`ReturnMap`."""
    return ReturnMap(params, template, options)(section_state)


def jacobian_central(
    stride_map: StrideMap, point: np.ndarray, step: float = DEFAULT_STEP
) -> np.ndarray:
    n = len(point)
    jac = np.empty((n, n))
    for j in range(n):
        delta = np.zeros(n)
        delta[j] = step
        jac[:, j] = (stride_map(point + delta) - stride_map(point - delta)) / (2.0 * step)
    return jac


def jacobian_forward(
    stride_map: StrideMap, point: np.ndarray, step: float = DEFAULT_STEP
) -> np.ndarray:
    n = len(point)
    base = stride_map(point)
    jac = np.empty((n, n))
    for j in range(n):
        delta = np.zeros(n)
        delta[j] = step
        jac[:, j] = (stride_map(point + delta) - base) / step
    return jac


JACOBIAN_SCHEMES: Dict[str, Callable[[StrideMap, np.ndarray, float], np.ndarray]] = {
    "central": jacobian_central,
    "forward": jacobian_forward,
}


def fixed_point_stability(
    stride_map: StrideMap,
    initial_guess: Sequence[float],
    damping: float = DEFAULT_DAMPING,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
    tolerance: float = DEFAULT_TOLERANCE,
    step: float = DEFAULT_STEP,
    coordinates: Optional[List[str]] = None,
    scheme: str = "central",
) -> ReturnMapResult:
    """
    Locate a fixed point by damped iteration and linearise the map there.

    Args:
        stride_map: Section-to-section map
        initial_guess: Starting section state
        damping: Relaxation factor of the iteration, in (0, 1]
        max_iterations: Iteration budget
        tolerance: Max-norm residual |P(x) − x| accepted as converged
        step: Finite-difference step per coordinate
        coordinates: Names of the section coordinates
        scheme: "central" (two map calls per column) or "forward" (one)

    Returns:
        ReturnMapResult with Jacobian and eigenvalue moduli

    Raises:
        AnalysisError: On divergence or when the budget is exhausted (carries
            the residual history)
        ConfigurationError: If the difference scheme is unknown
    """
    if scheme not in JACOBIAN_SCHEMES:
        raise ConfigurationError(
            f"Unknown difference scheme {scheme!r}; expected one of {sorted(JACOBIAN_SCHEMES)}"
        )
    x = np.asarray(initial_guess, dtype=float)
    names = coordinates or [f"x{i}" for i in range(len(x))]
    history: List[float] = []
    sections: List[List[float]] = [x.tolist()]
    residual = math.inf
    iterations = 0
    for iterations in range(1, max_iterations + 1):
        image = stride_map(x)
        if diverged(image):
            raise AnalysisError(f"Stride map diverged at iteration {iterations}", history)
        residual = float(np.max(np.abs(image - x)))
        history.append(residual)
        sections.append(image.tolist())
        logger.debug("Fixed-point iteration %d: residual %.3e", iterations, residual)
        if residual < tolerance:
            break
        x = x + damping * (image - x)
    else:
        raise AnalysisError(
            f"Fixed-point iteration did not converge in {max_iterations} iterations "
            f"(residual {residual:.3e})",
            history,
        )

    jac = JACOBIAN_SCHEMES[scheme](stride_map, x, step)
    if np.isnan(jac).any():
        raise AnalysisError("Stride map diverged while estimating the Jacobian", history)
    moduli = np.abs(np.linalg.eigvals(jac))
    logger.info("Fixed point after %d iterations, spectral radius %.4f", iterations, moduli.max())
    return ReturnMapResult(
        coordinates=names,
        fixed_point=x.tolist(),
        residual=residual,
        iterations=iterations,
        history=history,
        sections=sections,
        jacobian=jac.tolist(),
        eigenvalue_moduli=sorted(moduli.tolist(), reverse=True),
        spectral_radius=float(moduli.max()),
    )


def limit_cycle_stability(
    params: ModelParams,
    options: Optional[SimulationOptions] = None,
    warmup_strides: int = DEFAULT_WARMUP_STRIDES,
    **kwargs: Any,
) -> ReturnMapResult:
    """
    Walk from the nominal initial state, then analyse the stride map at the reached gait.

    Raises:
        AnalysisError: If the warm-up run falls or the iteration fails
    """
    simulator = WalkerSimulator(params, options)
    init = simulator.nominal_initial_state()
    trace = simulator.simulate(init, init.t + warmup_strides * params.stride_period)
    if trace.fall is not None:
        raise AnalysisError(f"Warm-up walk fell at t={trace.fall.t:.3f} s")
    stride_map = ReturnMap.from_trace(params, trace, options)
    return fixed_point_stability(
        stride_map,
        stride_map.template_section,
        coordinates=SECTION_COORDINATES,
        **kwargs,
    )
