import pytest

from app.models.params import SubphaseId, nominal_params
from app.models.state import LegRole, PhaseId
from app.services.gains import Gains, blend_gains, damping_from_ratio, gains_at, subphase_of
from app.utils.exceptions import ConfigurationError, ParameterError


class TestDampingFromRatio:
    def test_zero_ratio(self):
        assert damping_from_ratio(0.0, 14000.0, 75.0) == 0.0

    @pytest.mark.parametrize("zeta,expected", [(0.08, 163.95), (0.1, 204.94)])
    def test_nominal_ratios(self, zeta, expected):
        assert damping_from_ratio(zeta, 14000.0, 75.0) == pytest.approx(expected, abs=0.01)

    def test_rejects_non_positive_stiffness(self):
        with pytest.raises(ParameterError):
            damping_from_ratio(0.1, 0.0, 75.0)

    def test_rejects_negative_ratio(self):
        with pytest.raises(ParameterError):
            damping_from_ratio(-0.1, 14000.0, 75.0)

    def test_increases_with_ratio_and_stiffness(self):
        ratios = [0.0, 0.01, 0.08, 0.1, 0.5, 1.0]
        by_ratio = [damping_from_ratio(z, 14000.0, 75.0) for z in ratios]
        assert all(a < b for a, b in zip(by_ratio, by_ratio[1:]))
        stiffnesses = [9000.0, 10000.0, 14000.0, 20000.0]
        by_stiffness = [damping_from_ratio(0.08, k, 75.0) for k in stiffnesses]
        assert all(a < b for a, b in zip(by_stiffness, by_stiffness[1:]))


class TestSubphaseOf:
    def test_early_stance_is_touchdown(self, params):
        assert subphase_of(0.05, PhaseId.SINGLE_SUPPORT, params) is SubphaseId.TD

    def test_mid_stance(self, params):
        assert subphase_of(0.30, PhaseId.SINGLE_SUPPORT, params) is SubphaseId.SS

    def test_pushoff_leg(self, params):
        sub = subphase_of(0.55, PhaseId.SINGLE_SUPPORT_PUSHOFF, params, LegRole.PUSHOFF)
        assert sub is SubphaseId.PO

    def test_flat_leg_during_pushoff_phase_is_not_pushoff(self, params):
        sub = subphase_of(0.05, PhaseId.DOUBLE_SUPPORT_PUSHOFF, params, LegRole.FLAT)
        assert sub is SubphaseId.TD


class TestGainsAt:
    def test_case2_touchdown_stiffness(self):
        assert gains_at(SubphaseId.TD, 2, nominal_params(2)).k == 9000.0

    def test_case3_single_support_stiffness(self):
        assert gains_at(SubphaseId.SS, 3, nominal_params(3)).k == 10000.0

    @pytest.mark.parametrize("case_id", [1, 2, 3])
    def test_touchdown_ankle_stiffness(self, case_id):
        assert gains_at(SubphaseId.TD, case_id, nominal_params(case_id)).k_a == 200.0

    @pytest.mark.parametrize("case_id", [1, 2, 3])
    def test_pushoff_gains_shared_by_all_cases(self, case_id):
        gains = gains_at(SubphaseId.PO, case_id, nominal_params(case_id))
        assert gains.k == 14000.0
        assert gains.b == pytest.approx(damping_from_ratio(0.1, 14000.0, 75.0))
        assert gains.k_a == 0.0

    def test_unknown_case(self, params):
        with pytest.raises(ConfigurationError):
            gains_at(SubphaseId.SS, 4, params)

    def test_schedules_from_params(self):
        params = nominal_params(2)
        assert gains_at(SubphaseId.SS, None, params).k_a == 440.0

    def test_point_foot_has_no_ankle_stiffness(self, params):
        assert gains_at(SubphaseId.SS, 1, params.point_foot()).k_a == 0.0


def test_blend_clips_weight():
    start, end = Gains(1.0, 2.0, 3.0), Gains(3.0, 4.0, 5.0)
    assert blend_gains(start, end, 0.5) == Gains(2.0, 3.0, 4.0)
    assert blend_gains(start, end, 2.0) == end
