"""Shared fixtures for the walker test suite."""

import pytest

from app.models.params import ModelParams, SimulationOptions, nominal_params
from app.models.trace import GaitTrace
from app.services.simulator import WalkerSimulator

SHORT_WALK = 6.0


@pytest.fixture
def params() -> ModelParams:
    return nominal_params(1)


@pytest.fixture
def options() -> SimulationOptions:
    return SimulationOptions()


@pytest.fixture
def simulator(params, options) -> WalkerSimulator:
    return WalkerSimulator(params, options)


@pytest.fixture(scope="session")
def short_trace() -> GaitTrace:
    """A few strides of the nominal case-1 gait, shared by the slow tests."""
    simulator = WalkerSimulator(nominal_params(1))
    init = simulator.nominal_initial_state()
    return simulator.simulate(init, init.t + SHORT_WALK)
