"""Experiment orchestration."""

from .experiment_agent import ExperimentAgent, RunOutcome

__all__ = ["ExperimentAgent", "RunOutcome"]
