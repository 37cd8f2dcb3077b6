"""Experiment orchestrator: runs a scenario and writes its outputs."""

from __future__ import annotations

import logging
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, Iterator, List, Optional, Sequence

import pandas as pd
from rich.console import Console
from rich.progress import Progress, SpinnerColumn, TextColumn

from app import __version__
from app.config import Settings, get_settings
from app.models.metrics import CycleMetrics
from app.models.params import ModelParams
from app.models.scenario import (
    AnkleStabilizationBlock,
    CompareBlock,
    PerturbBlock,
    PoincareBlock,
    ReferenceGait,
    RunManifest,
    Scenario,
    SimulateBlock,
    SweepBlock,
)
from app.models.state import WalkerState
from app.models.trace import GaitTrace
from app.services.analysis import analyze_trace, stride_energy_balance, summarize
from app.services.experiments import (
    ankle_stabilization_experiment,
    compare_point_foot,
    perturbation_response,
    sweep,
)
from app.services.simulator import WalkerSimulator
from app.services.stability import limit_cycle_stability
from app.services.trace_io import (
    FLOAT_FORMAT,
    export_comparison_csv,
    export_metrics_csv,
    export_trace_csv,
    import_trace_csv,
    load_reference_gait,
)
from app.ui.console import WalkerConsole
from app.ui.display import WalkerDisplay, summary_line
from app.ui.plots import (
    render_comparison_plots,
    render_plots,
    render_speed_traces,
    render_velocity_plot,
)
from app.utils.exceptions import AnalysisError, ConfigurationError

logger = logging.getLogger(__name__)


@dataclass
class RunOutcome:
    """What a finished run produced."""

    kind: str
    output_dir: Path
    fell: bool = False
    summary: str = ""
    files: List[Path] = field(default_factory=list)


def _slug(name: str) -> str:
    return "".join(c if c.isalnum() or c in "-_." else "_" for c in name)


class ExperimentAgent:
    """Runs one scenario end to end: simulate, analyse, export, display."""

    def __init__(
        self,
        scenario: Scenario,
        settings: Optional[Settings] = None,
        output_dir: Optional[Path] = None,
        jobs: Optional[int] = None,
        console: Optional[WalkerConsole] = None,
        command: Optional[Sequence[str]] = None,
        reference_path: Optional[Path] = None,
    ):
        """
        Initialize the agent.

        Args:
            scenario: Validated scenario to run
            settings: Application settings (uses defaults if not provided)
            output_dir: Run directory (overrides scenario and settings)
            jobs: Worker processes for multi-run experiments
            console: Console for summaries; a recording console by default
            command: Command line echoed into the manifest
            reference_path: Reference gait CSV overriding the scenario's
        """
        self.settings = settings or get_settings()
        self.scenario = scenario
        self.options = scenario.options(self.settings)
        self.jobs = jobs or self.settings.jobs
        self.command = list(command or [])
        self.output_dir = Path(
            output_dir
            or scenario.output_dir
            or Path(self.settings.output_root) / _slug(scenario.name)
        )

        self.console = console or WalkerConsole(record=True)
        self.display = WalkerDisplay(self.console)
        self.status_console = Console(stderr=True)

        self.reference: Optional[ReferenceGait] = None
        reference = reference_path or scenario.reference_gait
        if reference:
            self.reference = load_reference_gait(reference)

        self._handlers: Dict[str, Callable[[], RunOutcome]] = {
            "simulate": self._run_simulate,
            "sweep": self._run_sweep,
            "ankle-stabilization": self._run_ankle_stabilization,
            "compare": self._run_compare,
            "poincare": self._run_poincare,
            "perturb": self._run_perturb,
        }

    @property
    def params(self) -> ModelParams:
        return self.scenario.model

    def run(self) -> RunOutcome:
        """
        Execute the scenario's experiment and write all outputs.

        Raises:
            ConfigurationError: If the output directory cannot be created or
                the experiment kind is unknown
            SimulationError: If integration fails
            AnalysisError: If a required analysis (e.g. the fixed point) fails
        """
        kind = self.scenario.experiment.kind
        handler = self._handlers.get(kind)
        if handler is None:
            raise ConfigurationError(f"Unknown experiment kind '{kind}'")
        self._prepare_output()
        self.display.display_scenario(self.scenario)
        logger.info("Running %s into %s", kind, self.output_dir)

        outcome = handler()
        self.display.display_outputs(outcome.files, self.output_dir)
        outcome.files.append(self.console.save_report(self.output_dir / "report.txt"))
        outcome.files.append(self._write_manifest(outcome))
        return outcome

    # ---------------------------------------------------------------- plumbing

    def _prepare_output(self) -> None:
        try:
            self.output_dir.mkdir(parents=True, exist_ok=True)
            marker = self.output_dir / ".write-test"
            marker.touch()
            marker.unlink()
        except OSError as exc:
            raise ConfigurationError(
                f"Output directory {self.output_dir} is not writable: {exc}"
            ) from None

    def _write_manifest(self, outcome: RunOutcome) -> Path:
        manifest = RunManifest(
            version=__version__,
            command=self.command,
            scenario=self.scenario,
            options=self.options,
            jobs=self.jobs,
            outputs=[str(p.relative_to(self.output_dir)) for p in outcome.files],
            fell=outcome.fell,
        )
        path = self.output_dir / "manifest.json"
        path.write_text(manifest.model_dump_json(indent=2), encoding="utf-8")
        return path

    @contextmanager
    def _progress(self, description: str) -> Iterator[None]:
        with Progress(
            SpinnerColumn(),
            TextColumn("[progress.description]{task.description}"),
            console=self.status_console,
            transient=True,
        ) as progress:
            progress.add_task(description, total=None)
            yield

    def initial_state(self, simulator: WalkerSimulator) -> WalkerState:
        """First state of a simulate run, from the scenario's initial block."""
        initial = self.scenario.initial
        state = simulator.nominal_initial_state(speed=initial.speed)
        if initial.kind == "explicit":
            state.y = float(initial.height)  # type: ignore[arg-type]
            state.vx = float(initial.vx)  # type: ignore[arg-type]
            state.vy = initial.vy
        return state

    def _analyse(self, trace: GaitTrace, params: ModelParams) -> List[CycleMetrics]:
        try:
            return analyze_trace(trace, params)
        except AnalysisError as exc:
            logger.warning("Cannot analyse run: %s", exc)
            return []

    def _write_run(
        self, trace: GaitTrace, metrics: List[CycleMetrics], directory: Path, label: str
    ) -> List[Path]:
        """Trace CSV, metrics CSVs and signal plots of one run."""
        files = [export_trace_csv(trace, directory / "trace.csv")]
        if metrics:
            files.extend(export_metrics_csv(metrics, directory / "metrics.csv"))
            files.extend(render_plots(metrics, self.reference, directory, label))
        return files

    def _write_table(self, rows: Sequence[Dict[str, object]], name: str) -> Path:
        path = self.output_dir / name
        pd.DataFrame(list(rows)).to_csv(path, index=False, float_format=FLOAT_FORMAT)
        return path

    # ---------------------------------------------------------------- experiments

    def _run_simulate(self) -> RunOutcome:
        block = self.scenario.experiment
        assert isinstance(block, SimulateBlock)
        simulator = WalkerSimulator(self.params, self.options)
        init = self.initial_state(simulator)
        with self._progress(f"Simulating {block.duration:g} s..."):
            trace = simulator.simulate(init, block.duration)
        metrics = self._analyse(trace, self.params)
        summary = summarize(trace, self.params)

        self.display.display_cycle_metrics(metrics)
        self.display.display_gait_summary(summary)
        if metrics:
            try:
                self.display.display_energy(stride_energy_balance(trace, self.params))
            except AnalysisError as exc:
                logger.warning("Energy balance unavailable: %s", exc)
        self.display.display_summary_line(summary)

        files = self._write_run(trace, metrics, self.output_dir, self.scenario.name)
        return RunOutcome(
            kind=block.kind,
            output_dir=self.output_dir,
            fell=summary.fell,
            summary=summary_line(summary),
            files=files,
        )

    def _run_sweep(self) -> RunOutcome:
        block = self.scenario.experiment
        assert isinstance(block, SweepBlock)
        with self._progress(f"Simulating cases {', '.join(map(str, block.cases))}..."):
            report, traces = sweep(
                self.params, block.cases, block.duration, self.options, self.jobs
            )

        files: List[Path] = []
        for case_id, trace in traces.items():
            case_params = self.params.for_case(case_id)
            metrics = self._analyse(trace, case_params)
            directory = self.output_dir / f"case{case_id}"
            files.extend(self._write_run(trace, metrics, directory, f"case {case_id}"))
        files.append(
            self._write_table(
                [{"case": r.case_id, **r.summary.model_dump()} for r in report.rows], "sweep.csv"
            )
        )
        self.display.display_sweep(report)
        fell = any(r.summary.fell for r in report.rows)
        lines = "; ".join(summary_line(r.summary, r.label) for r in report.rows)
        self.console.print(lines)
        return RunOutcome(block.kind, self.output_dir, fell, lines, files)

    def _run_ankle_stabilization(self) -> RunOutcome:
        block = self.scenario.experiment
        assert isinstance(block, AnkleStabilizationBlock)
        with self._progress(
            f"Walking {block.duration:g} s with placement control off at {block.switch_time:g} s..."
        ):
            report = ankle_stabilization_experiment(
                self.params,
                block.switch_time,
                block.offsets,
                block.duration,
                self.options,
                self.jobs,
            )
        files = [
            export_trace_csv(trace, self.output_dir / f"trace_{_slug(name)}.csv")
            for name, trace in report.traces.items()
            if name != "pre-switch"
        ]
        files.append(
            self._write_table([o.model_dump() for o in report.outcomes], "ankle_stabilization.csv")
        )
        files.append(render_velocity_plot(report, self.output_dir / "velocity.svg"))
        self.display.display_ankle_stabilization(report)

        walking = sum(1 for o in report.outcomes if not o.fell)
        line = f"{walking}/{len(report.outcomes)} offsets walking after the switch"
        self.console.print(line)
        return RunOutcome(block.kind, self.output_dir, not report.all_walking, line, files)

    def _run_compare(self) -> RunOutcome:
        block = self.scenario.experiment
        assert isinstance(block, CompareBlock)
        with self._progress("Simulating ankle-foot and point-foot models..."):
            comparison = compare_point_foot(self.params, block.duration, self.options, self.jobs)

        files: List[Path] = []
        for name, trace in comparison.traces.items():
            files.append(export_trace_csv(trace, self.output_dir / f"trace_{_slug(name)}.csv"))
        for result in (comparison.ankle, comparison.point_foot):
            params = self.params if result.variant == "ankle" else self.params.point_foot()
            metrics = self._analyse(comparison.traces[result.variant], params)
            if metrics:
                path = self.output_dir / f"metrics_{_slug(result.variant)}.csv"
                files.extend(export_metrics_csv(metrics, path))
        files.append(export_comparison_csv(comparison, self.output_dir / "comparison.csv"))
        files.extend(render_comparison_plots(comparison, self.output_dir))
        self.display.display_comparison(comparison)

        line = "; ".join(
            summary_line(r.summary, r.variant) for r in (comparison.ankle, comparison.point_foot)
        )
        self.console.print(line)
        return RunOutcome(block.kind, self.output_dir, comparison.partial, line, files)

    def _run_poincare(self) -> RunOutcome:
        block = self.scenario.experiment
        assert isinstance(block, PoincareBlock)
        with self._progress("Iterating the stride map..."):
            result = limit_cycle_stability(
                self.params,
                self.options,
                warmup_strides=block.warmup_strides,
                damping=block.damping,
                max_iterations=block.max_iterations,
                tolerance=block.tolerance,
                step=block.step,
                scheme=block.difference,
            )
        path = self.output_dir / "return_map.json"
        path.write_text(result.model_dump_json(indent=2), encoding="utf-8")
        self.display.display_return_map(result)

        verdict = "stable" if result.stable else "unstable"
        line = f"spectral radius {result.spectral_radius:.4f} ({verdict})"
        self.console.print(line)
        return RunOutcome(block.kind, self.output_dir, False, line, [path])

    def _run_perturb(self) -> RunOutcome:
        block = self.scenario.experiment
        assert isinstance(block, PerturbBlock)
        description = f"Injecting Δvx={block.delta_vx:+g} m/s at {block.inject_time:g} s..."
        with self._progress(description):
            report = perturbation_response(
                self.params,
                block.delta_vx,
                block.inject_time,
                block.duration,
                self.options,
                self.jobs,
            )
        files = [
            export_trace_csv(trace, self.output_dir / f"trace_{_slug(name)}.csv")
            for name, trace in report.traces.items()
            if name != "pre-injection"
        ]
        files.append(
            self._write_table([o.model_dump() for o in report.outcomes], "perturbation.csv")
        )
        perturbed = {k: v for k, v in report.traces.items() if k.endswith("/perturbed")}
        if perturbed:
            files.append(
                render_speed_traces(perturbed, self.output_dir / "velocity.svg", block.inject_time)
            )
        self.display.display_perturbation(report)

        fell = any(o.fell for o in report.outcomes)
        recovered = [o.controller for o in report.outcomes if o.recovered]
        line = f"recovered: {', '.join(recovered) or 'none'}"
        self.console.print(line)
        return RunOutcome(block.kind, self.output_dir, fell, line, files)

    # ---------------------------------------------------------------- re-plotting

    def plot(self, trace_path: Path) -> RunOutcome:
        """
        Analyse and plot a previously exported trace with the scenario's model.

        Raises:
            ConfigurationError: If the file is not a trace
            AnalysisError: If the trace holds no complete stride
        """
        self._prepare_output()
        trace = import_trace_csv(trace_path)
        metrics = analyze_trace(trace, self.params)
        summary = summarize(trace, self.params)
        self.display.display_cycle_metrics(metrics)
        self.display.display_summary_line(summary, Path(trace_path).name)

        files = export_metrics_csv(metrics, self.output_dir / "metrics.csv")
        files.extend(render_plots(metrics, self.reference, self.output_dir, self.scenario.name))
        self.display.display_outputs(files, self.output_dir)
        files.append(self.console.save_report(self.output_dir / "report.txt"))
        outcome = RunOutcome("plot", self.output_dir, summary.fell, summary_line(summary), files)
        outcome.files.append(self._write_manifest(outcome))
        return outcome
