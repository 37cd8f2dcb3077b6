import pytest

from app.models.params import ModelParams
from app.utils.validators import parse_fraction_of, validate_params


class TestParseFractionOf:
    def test_percent_of_reference(self):
        assert parse_fraction_of("20% of T", 1.15, "T") == pytest.approx(0.23)

    def test_bare_percent(self):
        assert parse_fraction_of("12%", 1.0, "L0") == pytest.approx(0.12)

    def test_wrong_reference(self):
        with pytest.raises(ValueError, match="percentage of T"):
            parse_fraction_of("20% of L0", 1.15, "T")

    def test_not_a_percentage(self):
        with pytest.raises(ValueError):
            parse_fraction_of("twenty", 1.15, "T")


class TestValidateParams:
    def test_nominal_is_admissible(self, params):
        assert validate_params(params) == []

    def test_zero_foot_length(self, params):
        violations = validate_params(params.model_copy(update={"foot_length": 0.0}))
        assert "foot length must be positive" in violations

    def test_pushoff_longer_than_stride(self, params):
        bad = params.model_copy(update={"pushoff_duration": 1.2 * params.stride_period})
        assert "push-off duration exceeds stride" in validate_params(bad)

    def test_point_foot_ignores_foot_length(self, params):
        point = params.model_copy(update={"foot_length": 0.0, "ankle_enabled": False})
        assert validate_params(point) == []

    def test_initial_speed_must_be_positive(self, params):
        bad = params.model_copy(update={"initial_speed": 0.0})
        assert "initial speed must be positive" in validate_params(bad)
        assert validate_params(params.model_copy(update={"initial_speed": None})) == []

    def test_lists_every_violation(self):
        bad = ModelParams(body_mass=-1.0, foot_length=0.0)
        violations = validate_params(bad)
        assert "body mass must be positive" in violations
        assert "foot length must be positive" in violations

    def test_shorthand_defaults_follow_period(self):
        params = ModelParams(stride_period=1.0)
        assert params.pushoff_duration == pytest.approx(0.2)
