"""Simulation, analysis and experiment services."""

from .analysis import analyze_trace, cycle_metrics, segment_cycles, stride_energy_balance, summarize
from .experiments import (
    ankle_stabilization_experiment,
    compare_point_foot,
    perturbation_response,
    sweep,
)
from .scenario_loader import load_scenario
from .simulator import WalkerSimulator, nominal_initial_state, simulate
from .stability import ReturnMap, fixed_point_stability, limit_cycle_stability, return_map
from .trace_io import export_metrics_csv, export_trace_csv, import_trace_csv, load_reference_gait

__all__ = [
    "WalkerSimulator",
    "simulate",
    "nominal_initial_state",
    "segment_cycles",
    "cycle_metrics",
    "analyze_trace",
    "summarize",
    "stride_energy_balance",
    "ReturnMap",
    "return_map",
    "fixed_point_stability",
    "limit_cycle_stability",
    "ankle_stabilization_experiment",
    "compare_point_foot",
    "perturbation_response",
    "sweep",
    "load_scenario",
    "export_trace_csv",
    "import_trace_csv",
    "export_metrics_csv",
    "load_reference_gait",
]
