import textwrap

import pytest

from app.models.scenario import (
    AnkleStabilizationBlock,
    PoincareBlock,
    SimulateBlock,
    retarget,
)
from app.services.scenario_loader import bundled_scenarios, load_scenario
from app.utils.exceptions import ScenarioError

VALID = """
name = "short"
case = 2

[model]
body_mass = 75.0
rest_leg_length = 1.0
stride_period = 1.15
pushoff_duration = "20% of T"

[experiment]
kind = "simulate"
duration = 5.0
"""


def _write(tmp_path, text, name="scenario.toml"):
    path = tmp_path / name
    path.write_text(textwrap.dedent(text), encoding="utf-8")
    return path


class TestBundledScenarios:
    def test_all_kinds_shipped(self):
        names = bundled_scenarios()
        for name in ("case1_nominal", "sweep", "ankle_stabilization", "poincare", "perturb"):
            assert name in names

    def test_case1_nominal(self):
        scenario = load_scenario("case1_nominal")
        assert scenario.name == "case1_nominal"
        assert scenario.model.case_id == 1
        assert scenario.model.pushoff_duration == pytest.approx(0.23)
        assert scenario.model.retraction_amplitude == pytest.approx(0.04)
        assert scenario.model.ankle_neutral_angle == pytest.approx(-0.03)
        assert scenario.model.initial_speed == 1.0
        assert isinstance(scenario.experiment, SimulateBlock)
        assert scenario.experiment.duration == 40.0

    def test_cfg_alias(self):
        assert load_scenario("case2_nominal.cfg").model.case_id == 2

    @pytest.mark.parametrize("name", ["case1_nominal", "sweep", "ankle_stabilization", "compare"])
    def test_bundled_files_are_valid(self, name):
        load_scenario(name)

    def test_unknown_name(self):
        with pytest.raises(ScenarioError, match="case1_nominal"):
            load_scenario("no_such_scenario")


class TestScenarioFiles:
    def test_valid_file(self, tmp_path):
        scenario = load_scenario(_write(tmp_path, VALID))
        assert scenario.model.case_id == 2
        assert scenario.model.leg_schedule.k_td == 9000.0
        assert scenario.experiment.duration == 5.0

    def test_missing_required_key(self, tmp_path):
        text = VALID.replace("stride_period = 1.15\n", "")
        with pytest.raises(ScenarioError) as info:
            load_scenario(_write(tmp_path, text))
        assert "model.stride_period: missing required key" in info.value.violations

    def test_syntax_error_reports_line(self, tmp_path):
        text = VALID.replace("body_mass = 75.0", "body_mass = = 75.0")
        with pytest.raises(ScenarioError, match="line"):
            load_scenario(_write(tmp_path, text))

    def test_collects_every_violation(self, tmp_path):
        text = VALID.replace("stride_period = 1.15\n", "").replace('kind = "simulate"\n', "")
        with pytest.raises(ScenarioError) as info:
            load_scenario(_write(tmp_path, text))
        assert "model.stride_period: missing required key" in info.value.violations
        assert "experiment.kind: missing required key" in info.value.violations

    def test_collects_parameter_violations(self, tmp_path):
        text = VALID.replace(
            "body_mass = 75.0", "body_mass = 75.0\nfoot_length = 0.0\nswing_clearance = -0.1"
        )
        with pytest.raises(ScenarioError) as info:
            load_scenario(_write(tmp_path, text))
        assert "model: foot length must be positive" in info.value.violations
        assert "model: swing clearance must be positive" in info.value.violations

    def test_unknown_case(self, tmp_path):
        with pytest.raises(ScenarioError, match="case"):
            load_scenario(_write(tmp_path, VALID.replace("case = 2", "case = 7")))

    def test_case_and_schedules_conflict(self, tmp_path):
        text = VALID + "\n[model.leg_schedule]\nk_td = 12000.0\n"
        with pytest.raises(ScenarioError, match="not both"):
            load_scenario(_write(tmp_path, text))

    def test_bad_percentage(self, tmp_path):
        text = VALID.replace('"20% of T"', '"20% of L0"')
        with pytest.raises(ScenarioError, match="model"):
            load_scenario(_write(tmp_path, text))

    def test_unknown_experiment_field(self, tmp_path):
        text = VALID.replace("duration = 5.0", "duration = 5.0\nspeed = 2.0")
        with pytest.raises(ScenarioError, match="experiment"):
            load_scenario(_write(tmp_path, text))

    def test_missing_reference_file(self, tmp_path):
        text = 'reference_gait = "human.csv"\n' + VALID
        with pytest.raises(ScenarioError, match="human.csv"):
            load_scenario(_write(tmp_path, text))


class TestExperimentBlocks:
    def test_switch_must_precede_end(self):
        with pytest.raises(ValueError):
            AnkleStabilizationBlock(switch_time=80.0, duration=70.0)

    def test_retarget_uses_defaults(self):
        scenario = retarget(load_scenario("case1_nominal"), "poincare")
        assert isinstance(scenario.experiment, PoincareBlock)
        assert scenario.experiment.damping == 0.8

    def test_retarget_unknown_kind(self):
        with pytest.raises(ScenarioError):
            retarget(load_scenario("case1_nominal"), "dance")

    def test_command_line_overrides(self):
        scenario = load_scenario("case1_nominal").with_experiment(duration=12.0, cases=None)
        assert scenario.experiment.duration == 12.0

    def test_invalid_override(self):
        with pytest.raises(ScenarioError):
            load_scenario("case1_nominal").with_experiment(duration=-1.0)
