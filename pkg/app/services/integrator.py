"""Adaptive RK45 stepping with event localization on the dense output."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import RK45, DenseOutput
from scipy.optimize import brentq

from app.models.params import SimulationOptions
from app.services.events import crossed
from app.utils.exceptions import EventLocalizationError, StepSizeUnderflowError

logger = logging.getLogger(__name__)

RightHandSide = Callable[[float, np.ndarray], np.ndarray]
Residual = Callable[[float, np.ndarray], float]


@dataclass
class StepOutcome:
    """Result of one accepted step, truncated at the earliest event if one fired."""

    t_old: float
    t: float
    y: np.ndarray
    dense: DenseOutput
    event_index: Optional[int] = None
    residual: float = 0.0

    @property
    def fired(self) -> bool:
        return self.event_index is not None


def locate_event(
    residual: Callable[[float], float],
    t_lo: float,
    t_hi: float,
    xtol: float,
) -> float:
    """
    Bracketed root of a residual on ``[t_lo, t_hi]``.

    Raises:
        EventLocalizationError: If the bracket holds no sign change
    """
    g_lo, g_hi = residual(t_lo), residual(t_hi)
    if g_hi == 0.0:
        return t_hi
    if g_lo * g_hi > 0.0:
        raise EventLocalizationError(
            f"No sign change on [{t_lo:.12g}, {t_hi:.12g}] (g={g_lo:.3e}, {g_hi:.3e})"
        )
    return float(brentq(residual, t_lo, t_hi, xtol=xtol, rtol=4.0 * np.finfo(float).eps))


def polish_event(
    residual: Callable[[float], float],
    t_lo: float,
    t_hi: float,
    tolerance: float,
) -> Tuple[float, float]:
    """
    Bisect a bracketed crossing until the residual is inside the tolerance.

    Returns:
        (t, residual at t)

    Raises:
        EventLocalizationError: If the bracket shrinks to adjacent floats first,
            i.e. the residual jumps across zero instead of crossing it
    """
    g_lo, g_hi = residual(t_lo), residual(t_hi)
    if abs(g_hi) <= tolerance:
        return t_hi, g_hi
    while True:
        t_mid = 0.5 * (t_lo + t_hi)
        if not t_lo < t_mid < t_hi:
            break
        g_mid = residual(t_mid)
        if abs(g_mid) <= tolerance:
            return t_mid, g_mid
        if (g_mid > 0.0) == (g_lo > 0.0):
            t_lo, g_lo = t_mid, g_mid
        else:
            t_hi, g_hi = t_mid, g_mid
    raise EventLocalizationError(
        f"Residual {g_hi:.3e} at t={t_hi:.17g} exceeds the event tolerance {tolerance:.1e}"
    )


class EventIntegrator:
    """
    Explicit Runge–Kutta 4(5) integration of one smooth mode.

    Each call to :meth:`step` advances the solver by one adaptive step. When a
    guard crosses zero inside the step, the crossing is localized on the
    step's interpolant and the outcome is truncated there; the caller applies
    the transition and starts a new integrator for the next mode.
    """

    def __init__(
        self,
        fun: RightHandSide,
        t0: float,
        y0: Sequence[float],
        t_bound: float,
        residuals: Sequence[Residual],
        directions: Sequence[int],
        options: SimulationOptions,
    ):
        if len(residuals) != len(directions):
            raise ValueError("Each residual needs a crossing direction")
        self._solver = RK45(
            fun,
            t0,
            np.asarray(y0, dtype=float),
            t_bound,
            rtol=options.rtol,
            atol=options.atol,
            max_step=options.max_step,
        )
        self._residuals = list(residuals)
        self._directions = list(directions)
        self._options = options
        # brentq runs well below the time tolerance so steep force residuals
        # also land inside the residual tolerance.
        self._xtol = min(options.event_time_tolerance, 1e-13)
        y = np.asarray(y0, dtype=float)
        self._previous: List[float] = [g(t0, y) for g in self._residuals]

    @property
    def t(self) -> float:
        return float(self._solver.t)

    @property
    def y(self) -> np.ndarray:
        return np.array(self._solver.y)

    @property
    def finished(self) -> bool:
        return self._solver.status == "finished"

    def step(self) -> StepOutcome:
        """
        Advance one step.

        Raises:
            StepSizeUnderflowError: If the solver cannot take a step
            EventLocalizationError: If a detected crossing cannot be bracketed or
                its residual cannot be brought inside the event tolerance
        """
        message = self._solver.step()
        if self._solver.status == "failed":
            raise StepSizeUnderflowError(
                f"Integrator failed at t={self._solver.t:.9g}: {message or 'step size underflow'}"
            )
        t_old = float(self._solver.t_old)
        t_new = float(self._solver.t)
        y_new = np.array(self._solver.y)
        dense = self._solver.dense_output()

        current = [g(t_new, y_new) for g in self._residuals]
        earliest: Optional[int] = None
        t_event = t_new
        for index, (direction, before, after) in enumerate(
            zip(self._directions, self._previous, current)
        ):
            if not crossed(direction, before, after):
                continue
            g = self._residuals[index]
            root = locate_event(lambda tau: g(tau, dense(tau)), t_old, t_new, self._xtol)
            if earliest is None or root < t_event:
                earliest, t_event = index, root
        self._previous = current

        if earliest is None:
            return StepOutcome(t_old=t_old, t=t_new, y=y_new, dense=dense)

        g = self._residuals[earliest]
        residual = float(g(t_event, dense(t_event)))
        if abs(residual) > self._options.event_tolerance:
            logger.debug(
                "Event %d residual %.3e above tolerance at t=%.12g, bisecting",
                earliest,
                residual,
                t_event,
            )
            t_event, residual = polish_event(
                lambda tau: g(tau, dense(tau)), t_old, t_new, self._options.event_tolerance
            )
        y_event = np.asarray(dense(t_event), dtype=float)
        return StepOutcome(
            t_old=t_old,
            t=t_event,
            y=y_event,
            dense=dense,
            event_index=earliest,
            residual=residual,
        )
