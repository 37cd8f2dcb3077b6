"""Multi-run experiments built on the simulator: stabilisation, ablation, perturbation, sweeps."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor, as_completed
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from app.models.metrics import (
    AnkleStabilizationReport,
    OffsetOutcome,
    PerturbationOutcome,
    PerturbationReport,
    PointFootComparison,
    SweepReport,
    SweepRow,
    VariantResult,
)
from app.models.params import ModelParams, SimulationOptions
from app.models.state import LegId, WalkerState
from app.models.trace import EventKind, GaitTrace, concatenate
from app.services.analysis import analyze_trace, converged, summarize
from app.services.gait_control import set_override
from app.services.simulator import WalkerSimulator
from app.services.stability import section_coordinates
from app.utils.exceptions import AnalysisError, ConfigurationError

logger = logging.getLogger(__name__)

CONVERGENCE_TOLERANCE = 1e-4
RECOVERY_TOLERANCE = 1e-3
STEADY_STRIDES = 5
DEFAULT_RECOVERY_STRIDES = 30


def run_jobs(fn: Callable[..., Any], tasks: Sequence[Tuple[Any, ...]], jobs: int = 1) -> List[Any]:
    """
    Run independent tasks, in worker processes when ``jobs > 1``.

    Results are returned in task order regardless of completion order.
    """
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(*task) for task in tasks]
    results: List[Any] = [None] * len(tasks)
    with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as executor:
        futures = {executor.submit(fn, *task): i for i, task in enumerate(tasks)}
        for future in as_completed(futures):
            results[futures[future]] = future.result()
    return results


def walk(
    params: ModelParams, t_end: float, options: Optional[SimulationOptions] = None
) -> GaitTrace:
    """Simulate from the nominal initial state until ``t_end``."""
    simulator = WalkerSimulator(params, options)
    init = simulator.nominal_initial_state()
    return simulator.simulate(init, t_end)


def continue_walk(
    params: ModelParams,
    state: WalkerState,
    t_end: float,
    options: Optional[SimulationOptions] = None,
) -> GaitTrace:
    return WalkerSimulator(params, options).simulate(state, t_end)


# ---------------------------------------------------------------- stride helpers


def touchdown_states(trace: GaitTrace, leg: LegId = LegId.LEFT) -> List[WalkerState]:
    events = trace.events_of(EventKind.TOUCHDOWN, leg)
    return [e.state_after for e in events if e.state_after is not None]


def stride_speeds(states: Sequence[WalkerState]) -> List[float]:
    return [(b.x - a.x) / (b.t - a.t) for a, b in zip(states, states[1:])]


def steady_speed(states: Sequence[WalkerState], strides: int = STEADY_STRIDES) -> Optional[float]:
    speeds = stride_speeds(states)
    return float(np.mean(speeds[-strides:])) if speeds else None


def settle_index(changes: Sequence[float], tolerance: float) -> Optional[int]:
    """First index from which every change stays below ``tolerance``."""
    index: Optional[int] = None
    for i, change in enumerate(changes):
        if change < tolerance:
            index = i if index is None else index
        else:
            index = None
    return index


def current_placement(trace: GaitTrace, leg: LegId = LegId.LEFT) -> Optional[float]:
    """Heel offset of the latest touchdown of ``leg``."""
    states = touchdown_states(trace, leg)
    if not states:
        return None
    last = states[-1]
    return last.legs[leg].heel[0] - last.x


# ---------------------------------------------------------------- ankle-only stabilisation


def ankle_stabilization_experiment(
    params: ModelParams,
    t_switch: float,
    fixed_offsets: Sequence[float],
    t_end: float,
    options: Optional[SimulationOptions] = None,
    jobs: int = 1,
) -> AnkleStabilizationReport:
    """
    Walk under the placement law until ``t_switch``, then hold each fixed offset.

    Falls are reported, not raised.

    Raises:
        ConfigurationError: If ``t_switch`` is not before ``t_end``
    """
    if not t_switch < t_end:
        raise ConfigurationError(f"Switch time {t_switch} must precede the end time {t_end}")
    logger.info("Walking to the switch at t=%.1f s", t_switch)
    before = walk(params, t_switch, options)
    report = AnkleStabilizationReport(t_switch=t_switch, t_end=t_end)
    report.traces["pre-switch"] = before
    pre_states = touchdown_states(before)
    report.pre_switch_speed = steady_speed(pre_states)
    report.pre_switch_offset = current_placement(before)

    if before.fall is not None or before.final_state is None:
        report.outcomes = [
            OffsetOutcome(
                offset=offset,
                fell=True,
                fall_time=before.fall.t if before.fall else None,
                fall_reason=before.fall.reason if before.fall else None,
            )
            for offset in fixed_offsets
        ]
        return report

    variants = [params.with_placement(set_override(params.placement_law, o)) for o in fixed_offsets]
    logger.info("Switching to %d fixed placements", len(variants))
    tasks = [(v, before.final_state, t_end, options) for v in variants]
    afters: List[GaitTrace] = run_jobs(continue_walk, tasks, jobs)

    for offset, variant, after in zip(fixed_offsets, variants, afters):
        report.traces[f"offset={offset:g}"] = concatenate(before, after)
        report.outcomes.append(_offset_outcome(offset, variant, after, report.pre_switch_speed))
    return report


def _offset_outcome(
    offset: float, params: ModelParams, after: GaitTrace, pre_speed: Optional[float]
) -> OffsetOutcome:
    states = touchdown_states(after)
    sections = [section_coordinates(s, params) for s in states]
    changes = [float(np.max(np.abs(b - a))) for a, b in zip(sections, sections[1:])]
    settle = settle_index(changes, CONVERGENCE_TOLERANCE)
    speed = steady_speed(states)
    change_pct = None
    if speed is not None and pre_speed:
        change_pct = 100.0 * (speed - pre_speed) / pre_speed
    fall = after.fall
    return OffsetOutcome(
        offset=offset,
        fell=fall is not None,
        fall_time=fall.t if fall else None,
        fall_reason=fall.reason if fall else None,
        strides_after_switch=max(len(states) - 1, 0),
        steady_speed=speed,
        speed_change_pct=change_pct,
        converged=settle is not None and fall is None,
        strides_to_converge=None if settle is None else settle + 1,
    )


# ---------------------------------------------------------------- point-foot comparison


def compare_point_foot(
    params: ModelParams,
    t_end: float = 40.0,
    options: Optional[SimulationOptions] = None,
    jobs: int = 1,
) -> PointFootComparison:
    """Run the full ankle-foot model and its point-foot ablation on the same scenario."""
    variants = {"ankle": params, "point-foot": params.point_foot()}
    traces: List[GaitTrace] = run_jobs(
        walk, [(p, t_end, options) for p in variants.values()], jobs
    )
    results: Dict[str, VariantResult] = {}
    for (name, variant), trace in zip(variants.items(), traces):
        results[name] = _variant_result(name, variant, trace)
        if trace.fell:
            logger.warning("Variant %s fell; comparison is partial", name)
    return PointFootComparison(
        ankle=results["ankle"],
        point_foot=results["point-foot"],
        traces=dict(zip(variants, traces)),
    )


def _variant_result(name: str, params: ModelParams, trace: GaitTrace) -> VariantResult:
    summary = summarize(trace, params)
    representative = None
    try:
        representative = converged(analyze_trace(trace, params))[-1]
    except AnalysisError:
        pass
    return VariantResult(variant=name, summary=summary, representative=representative)


# ---------------------------------------------------------------- perturbation response


def perturbation_response(
    params: ModelParams,
    delta_vx: float,
    t_inject: float,
    t_end: Optional[float] = None,
    options: Optional[SimulationOptions] = None,
    jobs: int = 1,
) -> PerturbationReport:
    """
    Kick the mass forward at ``t_inject`` and measure recovery.

    Each controller (full placement control, fixed placement) is compared with
    its own unperturbed continuation from the same instant.
    """
    horizon = t_end
    if horizon is None:
        horizon = t_inject + DEFAULT_RECOVERY_STRIDES * params.stride_period
    before = walk(params, t_inject, options)
    report = PerturbationReport(delta_vx=delta_vx, t_inject=t_inject)
    report.traces["pre-injection"] = before
    if before.fall is not None or before.final_state is None:
        report.outcomes = [
            PerturbationOutcome(
                controller=name,
                delta_vx=delta_vx,
                t_inject=t_inject,
                fell=True,
                fall_time=before.fall.t if before.fall else None,
            )
            for name in ("full", "fixed-placement")
        ]
        return report

    offset = current_placement(before)
    controllers = {"full": params}
    if offset is not None:
        controllers["fixed-placement"] = params.with_placement(
            set_override(params.placement_law, offset)
        )
    start = before.final_state
    kicked = start.copy()
    kicked.vx += delta_vx

    tasks = []
    for controller in controllers.values():
        tasks.append((controller, start, horizon, options))
        tasks.append((controller, kicked, horizon, options))
    runs: List[GaitTrace] = run_jobs(continue_walk, tasks, jobs)

    for i, (name, controller) in enumerate(controllers.items()):
        reference, perturbed = runs[2 * i], runs[2 * i + 1]
        report.traces[f"{name}/reference"] = reference
        report.traces[f"{name}/perturbed"] = perturbed
        report.outcomes.append(
            _perturbation_outcome(name, controller, delta_vx, t_inject, reference, perturbed)
        )
    return report


def _perturbation_outcome(
    name: str,
    params: ModelParams,
    delta_vx: float,
    t_inject: float,
    reference: GaitTrace,
    perturbed: GaitTrace,
) -> PerturbationOutcome:
    t_ref, t_pert = reference.time, perturbed.time
    window = t_ref <= t_pert[-1]
    vx_pert = np.interp(t_ref[window], t_pert, perturbed.column("vx"))
    max_deviation = float(np.max(np.abs(vx_pert - reference.column("vx")[window])))

    ref_sections = [section_coordinates(s, params) for s in touchdown_states(reference)]
    pert_sections = [section_coordinates(s, params) for s in touchdown_states(perturbed)]
    deviations = [float(np.max(np.abs(a - b))) for a, b in zip(ref_sections, pert_sections)]
    settle = settle_index(deviations, RECOVERY_TOLERANCE)
    fall = perturbed.fall
    return PerturbationOutcome(
        controller=name,
        delta_vx=delta_vx,
        t_inject=t_inject,
        fell=fall is not None,
        fall_time=fall.t if fall else None,
        max_deviation=max_deviation,
        recovered=fall is None and settle is not None,
        strides_to_recovery=None if settle is None else settle,
    )


# ---------------------------------------------------------------- case sweep


def sweep(
    params: ModelParams,
    case_ids: Sequence[int] = (1, 2, 3),
    t_end: float = 40.0,
    options: Optional[SimulationOptions] = None,
    jobs: int = 1,
) -> Tuple[SweepReport, Dict[int, GaitTrace]]:
    """Simulate each stiffness case from the nominal initial state."""
    variants = [params.for_case(case_id) for case_id in case_ids]
    logger.info("Sweeping cases %s with %d job(s)", list(case_ids), jobs)
    traces: List[GaitTrace] = run_jobs(walk, [(v, t_end, options) for v in variants], jobs)
    rows = [
        SweepRow(case_id=case_id, label=f"case{case_id}", summary=summarize(trace, variant))
        for case_id, variant, trace in zip(case_ids, variants, traces)
    ]
    return SweepReport(rows=rows), dict(zip(case_ids, traces))
