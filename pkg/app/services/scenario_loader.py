"""Scenario loading from TOML files, including the bundled scenarios."""

from __future__ import annotations

import logging
import tomllib
from importlib import resources
from pathlib import Path
from typing import Any, Dict, List, Union

from pydantic import ValidationError

from app.models.params import ModelParams
from app.models.scenario import Scenario, validation_messages
from app.utils.exceptions import ConfigurationError, ScenarioError
from app.utils.validators import validate_params

logger = logging.getLogger(__name__)

BUNDLED_PACKAGE = "app.scenarios"
SCENARIO_SUFFIXES = (".toml", ".cfg")
REQUIRED_MODEL_KEYS = ("body_mass", "rest_leg_length", "stride_period")


def bundled_scenarios() -> List[str]:
    """Names of the scenarios shipped with the package."""
    root = resources.files(BUNDLED_PACKAGE)
    return sorted(
        Path(entry.name).stem for entry in root.iterdir() if entry.name.endswith(".toml")
    )


def resolve_scenario_path(name_or_path: Union[str, Path]) -> Path:
    """
    Find a scenario file on disk or among the bundled scenarios.

    ``case1_nominal``, ``case1_nominal.toml`` and ``case1_nominal.cfg`` all
    name the bundled file when no such file exists in the working directory.

    Raises:
        ScenarioError: If no file matches
    """
    path = Path(name_or_path)
    if path.is_file():
        return path
    stem = path.name
    for suffix in SCENARIO_SUFFIXES:
        if stem.endswith(suffix):
            stem = stem[: -len(suffix)]
    bundled = resources.files(BUNDLED_PACKAGE).joinpath(f"{stem}.toml")
    if bundled.is_file():
        return Path(str(bundled))
    raise ScenarioError(
        f"Scenario '{name_or_path}' not found; bundled scenarios: {', '.join(bundled_scenarios())}"
    )


def parse_scenario_text(text: str, origin: str) -> Dict[str, Any]:
    """
    Parse scenario TOML.

    Raises:
        ScenarioError: On syntax errors; the message carries line and column
    """
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioError(f"Cannot parse scenario {origin}: {exc}") from None


def build_scenario(raw: Dict[str, Any], name: str, base_dir: Path, source: str) -> Scenario:
    """
    Turn parsed TOML into a validated scenario.

    All problems found (missing keys, type errors, parameter violations,
    missing files) are collected and raised together.

    Raises:
        ScenarioError: If anything is missing or invalid
    """
    problems: List[str] = []
    model_raw = raw.get("model")
    if not isinstance(model_raw, dict):
        raise ScenarioError(f"Scenario {name} is invalid", ["model: missing required table"])
    for key in REQUIRED_MODEL_KEYS:
        if key not in model_raw:
            problems.append(f"model.{key}: missing required key")

    experiment = raw.get("experiment")
    if isinstance(experiment, dict) and "kind" not in experiment:
        problems.append("experiment.kind: missing required key")

    case = raw.get("case")
    if case is not None and ("leg_schedule" in model_raw or "ankle_schedule" in model_raw):
        problems.append("case: give either a case id or explicit schedules, not both")
    if problems:
        raise ScenarioError(f"Scenario {name} is invalid", problems)

    try:
        params = ModelParams.model_validate(model_raw)
    except ValidationError as exc:
        raise ScenarioError(
            f"Scenario {name} is invalid",
            [f"model.{line}" for line in validation_messages(exc)],
        ) from None
    if case is not None:
        try:
            params = params.for_case(int(case))
        except (ConfigurationError, TypeError, ValueError) as exc:
            raise ScenarioError(f"Scenario {name} is invalid", [f"case: {exc}"]) from None

    reference = raw.get("reference_gait")
    if reference is not None:
        reference_path = Path(reference)
        if not reference_path.is_absolute():
            reference_path = base_dir / reference_path
        if not reference_path.is_file():
            problems.append(f"reference_gait: file not found: {reference_path}")
        reference = str(reference_path)

    payload = {
        **raw,
        "name": raw.get("name", name),
        "model": params,
        "reference_gait": reference,
        "source": source,
    }
    try:
        scenario = Scenario.model_validate(payload)
    except ValidationError as exc:
        problems.extend(validation_messages(exc))
        raise ScenarioError(f"Scenario {name} is invalid", problems) from None

    problems.extend(f"model: {v}" for v in validate_params(scenario.model))
    if problems:
        raise ScenarioError(f"Scenario {name} is invalid", problems)
    return scenario


def load_scenario(name_or_path: Union[str, Path]) -> Scenario:
    """
    Load and validate a scenario file.

    Args:
        name_or_path: Path to a TOML file or the name of a bundled scenario

    Returns:
        Fully validated Scenario with defaults filled in

    Raises:
        ScenarioError: On unknown names, syntax errors or validation failures
    """
    path = resolve_scenario_path(name_or_path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"Cannot read scenario {path}: {exc}") from None
    raw = parse_scenario_text(text, str(path))
    scenario = build_scenario(raw, path.stem, path.parent, str(path))
    logger.info("Loaded scenario %s (%s)", scenario.name, scenario.experiment.kind)
    return scenario
