import numpy as np
import pytest

from app.models.params import SimulationOptions
from app.services.integrator import EventIntegrator, locate_event, polish_event
from app.utils.exceptions import EventLocalizationError


def _drift(t, y):
    return np.array([1.0])


def _run(residual, **options):
    options.setdefault("max_step", 0.05)
    integrator = EventIntegrator(
        _drift, 0.0, [0.0], 2.0, [residual], [-1], SimulationOptions(**options)
    )
    while not integrator.finished:
        outcome = integrator.step()
        if outcome.fired:
            return outcome
    return None


class TestLocateEvent:
    def test_linear_root(self):
        assert locate_event(lambda t: 1.0 - t, 0.0, 2.0, 1e-12) == pytest.approx(1.0, abs=1e-12)

    def test_root_at_upper_end(self):
        assert locate_event(lambda t: 1.0 - t, 0.0, 1.0, 1e-12) == 1.0

    def test_no_sign_change(self):
        with pytest.raises(EventLocalizationError):
            locate_event(lambda t: 1.0 + t, 0.0, 2.0, 1e-12)


class TestEventIntegrator:
    def test_fires_at_linear_crossing(self):
        outcome = _run(lambda t, y: 1.0 - y[0])
        assert outcome is not None
        assert outcome.t == pytest.approx(1.0, abs=1e-9)
        assert outcome.y[0] == pytest.approx(1.0, abs=1e-9)
        assert abs(outcome.residual) < 1e-9

    def test_double_root_does_not_fire(self):
        assert _run(lambda t, y: (y[0] - 1.013) ** 2) is None

    def test_rising_crossing_ignored_by_falling_guard(self):
        assert _run(lambda t, y: y[0] - 1.0) is None

    def test_mismatched_directions(self):
        with pytest.raises(ValueError):
            EventIntegrator(_drift, 0.0, [0.0], 1.0, [lambda t, y: 1.0], [], SimulationOptions())

    def test_steep_residual_is_bisected_into_tolerance(self):
        outcome = _run(lambda t, y: 1e3 * (1.0 - y[0]), event_tolerance=1e-12)
        assert outcome is not None
        assert abs(outcome.residual) <= 1e-12

    def test_jump_across_zero_raises(self):
        with pytest.raises(EventLocalizationError):
            _run(lambda t, y: 1.0 if y[0] < 1.0 else -1.0)


class TestPolishEvent:
    def test_returns_point_inside_tolerance(self):
        t, g = polish_event(lambda t: 50.0 * (0.3 - t), 0.0, 1.0, 1e-10)
        assert abs(g) <= 1e-10
        assert t == pytest.approx(0.3, abs=1e-11)

    def test_accepts_upper_end_already_inside(self):
        assert polish_event(lambda t: 1.0 - t, 0.0, 1.0, 1e-9) == (1.0, 0.0)

    def test_discontinuous_residual_raises(self):
        with pytest.raises(EventLocalizationError):
            polish_event(lambda t: 1.0 if t < 0.5 else -1.0, 0.0, 1.0, 1e-9)
