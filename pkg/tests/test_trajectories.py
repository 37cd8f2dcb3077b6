import math

import numpy as np
import pytest

from app.services.trajectories import (
    leg_length_curve,
    leg_length_reference,
    pushoff_foot_angle,
    quintic_between,
    swing_heel_reference,
)
from app.utils.exceptions import ParameterError, TrajectoryDomainError


def _quintic_oracle(p0, v0, a0, p1, v1, a1, h):
    """Coefficients in local time from the full 6x6 boundary system."""
    rows = []
    for t in (0.0, h):
        rows.append([t**i for i in range(6)])
        rows.append([i * t ** (i - 1) if i >= 1 else 0.0 for i in range(6)])
        rows.append([i * (i - 1) * t ** (i - 2) if i >= 2 else 0.0 for i in range(6)])
    rhs = [p0, v0, a0, p1, v1, a1]
    return np.linalg.solve(np.array(rows), np.array(rhs))


class TestQuintic:
    def test_unit_min_jerk(self):
        seg = quintic_between(0, 0, 0, 1, 0, 0, 0, 1)
        assert seg.evaluate(0.5) == pytest.approx(0.5)
        assert seg.evaluate(0.0, 1) == pytest.approx(0.0, abs=1e-12)
        assert seg.evaluate(1.0, 1) == pytest.approx(0.0, abs=1e-12)

    def test_matches_linear_solve(self):
        seg = quintic_between(0.9, 0, 0, 1.0, 0, 0, 0, 0.2)
        coefficients = _quintic_oracle(0.9, 0, 0, 1.0, 0, 0, 0.2)
        for t in np.linspace(0.0, 0.2, 7):
            expected = np.polynomial.polynomial.polyval(t, coefficients)
            assert seg.evaluate(float(t)) == pytest.approx(expected, abs=1e-12)

    def test_boundary_derivatives(self):
        seg = quintic_between(1.0, -0.5, 2.0, 0.0, 0.3, -1.0, 1.0, 1.5)
        assert seg.evaluate(1.0, 1) == pytest.approx(-0.5)
        assert seg.evaluate(1.0, 2) == pytest.approx(2.0)
        assert seg.evaluate(1.5, 1) == pytest.approx(0.3)
        assert seg.evaluate(1.5, 2) == pytest.approx(-1.0)

    def test_rejects_empty_interval(self):
        with pytest.raises(TrajectoryDomainError):
            quintic_between(0, 0, 0, 1, 0, 0, 1.0, 1.0)

    def test_evaluation_outside_segment(self):
        seg = quintic_between(0, 0, 0, 1, 0, 0, 0, 1)
        with pytest.raises(TrajectoryDomainError):
            seg.evaluate(1.5)
        assert math.isfinite(seg.evaluate(1.5, extrapolate=True))


class TestLegLength:
    def test_rest_length_in_first_half(self, params):
        assert leg_length_reference(0.25 * params.stride_period, params) == (1.0, 0.0)

    def test_minimum_at_three_quarters(self, params):
        length, rate = leg_length_reference(0.75 * params.stride_period, params)
        assert length == pytest.approx(params.rest_leg_length - params.retraction_amplitude)
        assert rate == pytest.approx(0.0, abs=1e-12)

    def test_outside_period(self, params):
        with pytest.raises(TrajectoryDomainError):
            leg_length_reference(params.stride_period, params)
        with pytest.raises(TrajectoryDomainError):
            leg_length_reference(-0.01, params)

    @pytest.mark.parametrize("order", [0, 1, 2, 3])
    def test_smooth_at_the_minimum(self, params, order):
        (jump,) = leg_length_curve(params).knot_mismatch(order)
        assert jump == pytest.approx(0.0, abs=1e-8)

    @pytest.mark.parametrize("order", [0, 1, 2])
    def test_continuous_at_the_ends(self, params, order):
        curve = leg_length_curve(params)
        assert curve.evaluate(curve.t_start, order) == pytest.approx(
            1.0 if order == 0 else 0.0, abs=1e-9
        )
        assert curve.evaluate(curve.t_end, order) == pytest.approx(
            1.0 if order == 0 else 0.0, abs=1e-9
        )


class TestPushoffFootAngle:
    def test_starts_flat(self, params):
        assert pushoff_foot_angle(0.0, params) == pytest.approx((0.0, 0.0))

    def test_reaches_target_angle(self, params):
        angle, rate = pushoff_foot_angle(params.pushoff_duration, params)
        assert angle == pytest.approx(0.5236, abs=1e-4)
        assert rate == 0.0

    def test_holds_after_pushoff(self, params):
        assert pushoff_foot_angle(2 * params.pushoff_duration, params) == (
            params.pushoff_angle,
            0.0,
        )


class TestSwingHeel:
    START, TARGET = (-0.4, 0.0), (0.3, 0.0)

    def test_starts_at_liftoff(self):
        (x, y), _ = swing_heel_reference(0.0, self.START, self.TARGET, 0.08)
        assert (x, y) == pytest.approx(self.START)

    def test_ends_at_target_with_zero_speed(self):
        (x, y), (dx, _) = swing_heel_reference(1.0, self.START, self.TARGET, 0.08)
        assert (x, y) == pytest.approx(self.TARGET)
        assert dx == pytest.approx(0.0, abs=1e-12)

    def test_apex_height(self):
        (_, y), _ = swing_heel_reference(0.5, self.START, self.TARGET, 0.08)
        assert y == pytest.approx(0.08)

    @pytest.mark.parametrize("h_clr", [0.0, -0.05])
    def test_rejects_non_positive_clearance(self, h_clr):
        with pytest.raises(ParameterError):
            swing_heel_reference(0.5, self.START, self.TARGET, h_clr)

    def test_progress_outside_swing(self):
        with pytest.raises(TrajectoryDomainError):
            swing_heel_reference(1.2, self.START, self.TARGET, 0.08)
        (_, y), _ = swing_heel_reference(1.05, self.START, self.TARGET, 0.08, extrapolate=True)
        assert y < 0.0
