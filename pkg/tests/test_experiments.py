import time

import pytest

from app.services.experiments import (
    ankle_stabilization_experiment,
    compare_point_foot,
    current_placement,
    perturbation_response,
    run_jobs,
    settle_index,
    steady_speed,
    stride_speeds,
    sweep,
    touchdown_states,
    walk,
)
from app.utils.exceptions import ConfigurationError


def _delayed_square(value, delay):
    time.sleep(delay)
    return value * value


class TestRunJobs:
    TASKS = [(1, 0.3), (2, 0.0), (3, 0.15), (4, 0.0)]

    def test_serial_keeps_order(self):
        assert run_jobs(_delayed_square, self.TASKS, jobs=1) == [1, 4, 9, 16]

    def test_parallel_keeps_task_order(self):
        # the slowest task is submitted first, so completion order differs from task order
        assert run_jobs(_delayed_square, self.TASKS, jobs=2) == [1, 4, 9, 16]

    def test_empty(self):
        assert run_jobs(_delayed_square, [], jobs=4) == []


class TestSettleIndex:
    def test_settles_after_transient(self):
        assert settle_index([0.5, 0.1, 1e-5, 1e-6, 1e-7], 1e-4) == 2

    def test_late_excursion_resets(self):
        assert settle_index([1e-5, 1e-3, 1e-6], 1e-4) == 2

    def test_never_settles(self):
        assert settle_index([0.5, 0.2, 0.1], 1e-4) is None

    def test_empty(self):
        assert settle_index([], 1e-4) is None


class TestStrideHelpers:
    def test_left_touchdowns_one_period_apart(self, params, short_trace):
        states = touchdown_states(short_trace)
        assert len(states) >= 3
        gaps = [b.t - a.t for a, b in zip(states, states[1:])]
        assert gaps == pytest.approx([params.stride_period] * len(gaps), abs=1e-6)

    def test_speeds_are_walking_speeds(self, short_trace):
        speeds = stride_speeds(touchdown_states(short_trace))
        assert all(0.5 < v < 2.0 for v in speeds)
        assert steady_speed(touchdown_states(short_trace)) == pytest.approx(
            sum(speeds[-5:]) / len(speeds[-5:])
        )

    def test_current_placement_is_forward(self, short_trace):
        assert 0.0 < current_placement(short_trace) < 0.6


class TestAnkleStabilization:
    def test_switch_must_precede_end(self, params):
        with pytest.raises(ConfigurationError, match="must precede"):
            ankle_stabilization_experiment(params, 10.0, [0.3], 10.0)

    @pytest.mark.slow
    def test_short_switch_keeps_walking(self, params):
        held = current_placement(walk(params, 8.0))
        offsets = [held - 0.001, held + 0.001]
        report = ankle_stabilization_experiment(params, 8.0, offsets, 16.0)

        assert report.pre_switch_speed is not None
        assert report.pre_switch_offset == pytest.approx(held)
        assert [o.offset for o in report.outcomes] == offsets
        assert report.all_walking
        assert all(o.strides_after_switch >= 5 for o in report.outcomes)
        assert set(report.traces) == {"pre-switch", *(f"offset={o:g}" for o in offsets)}


class TestPointFootComparison:
    @pytest.mark.slow
    def test_both_variants_walk(self, params):
        comparison = compare_point_foot(params, t_end=12.0)
        assert not comparison.partial
        assert set(comparison.traces) == {"ankle", "point-foot"}
        assert comparison.ankle.summary.strides > 5
        assert comparison.point_foot.summary.strides > 5


class TestPerturbationResponse:
    @pytest.mark.slow
    def test_zero_kick_leaves_gait_unchanged(self, params):
        report = perturbation_response(params, 0.0, 6.0, t_end=12.0)
        assert [o.controller for o in report.outcomes] == ["full", "fixed-placement"]
        for outcome in report.outcomes:
            assert not outcome.fell
            assert outcome.max_deviation == 0.0
            assert outcome.recovered
            assert outcome.strides_to_recovery == 0

    @pytest.mark.slow
    def test_small_kick_is_absorbed(self, params):
        report = perturbation_response(params, 0.005, 15.0)
        outcomes = {o.controller: o for o in report.outcomes}
        assert set(outcomes) == {"full", "fixed-placement"}
        for outcome in outcomes.values():
            assert not outcome.fell
            assert outcome.max_deviation > 0.0
        assert outcomes["full"].recovered
        assert set(report.traces) == {
            "pre-injection",
            "full/reference",
            "full/perturbed",
            "fixed-placement/reference",
            "fixed-placement/perturbed",
        }


class TestSweep:
    @pytest.mark.slow
    def test_rows_follow_case_order(self, params):
        report, traces = sweep(params, case_ids=(2, 1), t_end=8.0)
        assert [row.case_id for row in report.rows] == [2, 1]
        assert set(traces) == {1, 2}
        assert report.by_case(1).label == "case1"
        assert not report.by_case(2).summary.fell
        assert report.by_case(3) is None
