"""Display formatters for simulation results using Rich."""

from pathlib import Path
from typing import List, Optional, Sequence

from rich.panel import Panel
from rich.table import Table

from app.models.metrics import (
    AnkleStabilizationReport,
    CycleMetrics,
    EnergyBalance,
    GaitSummary,
    PerturbationReport,
    PointFootComparison,
    ReturnMapResult,
    SweepReport,
)
from app.models.scenario import Scenario
from app.ui.console import WalkerConsole
from app.utils.formatters import (
    format_fall,
    format_fraction,
    format_percent,
    format_ratio,
    format_scientific,
    format_seconds,
    format_speed,
)

# Most recent strides shown in the cycle table.
MAX_CYCLE_ROWS = 10


def summary_line(summary: GaitSummary, label: str = "") -> str:
    """One-line run summary: strides, mean speed, fall status."""
    prefix = f"{label}: " if label else ""
    return (
        f"{prefix}{summary.strides} strides, mean speed {format_speed(summary.mean_speed)}, "
        f"{format_fall(summary.fell, summary.fall_time, summary.fall_reason)}"
    )


class WalkerDisplay:
    """Display formatters for simulation runs and experiment reports."""

    def __init__(self, console: WalkerConsole):
        """
        Initialize the display.

        Args:
            console: WalkerConsole instance
        """
        self.console = console

    def display_scenario(self, scenario: Scenario):
        """Display the scenario being run."""
        p = scenario.model
        case = f"case {p.case_id}" if p.case_id is not None else "custom schedules"
        foot = "ankle-foot" if p.ankle_enabled else "point-foot"
        content = (
            f"[bold]{scenario.name}[/bold] ({scenario.experiment.kind})\n"
            f"[dim]Model:[/dim] {case}, {foot}, m={p.body_mass:g} kg, "
            f"L0={p.rest_leg_length:g} m, T={p.stride_period:g} s\n"
            f"[dim]Placement:[/dim] c0={p.placement_law.c0:g} m, c1={p.placement_law.c1:g} s, "
            f"c2={p.placement_law.c2:g} s, v_ref={p.placement_law.v_ref:g} m/s"
        )
        self.console.print(Panel(content, title="Scenario", border_style="blue"))

    def display_summary_line(self, summary: GaitSummary, label: str = ""):
        style = "negative" if summary.fell else "positive"
        self.console.print(f"[{style}]{summary_line(summary, label)}[/{style}]")

    def display_gait_summary(self, summary: GaitSummary, title: str = "Gait Summary"):
        """Display averages over the converged strides."""
        content = (
            f"[bold]Strides:[/bold] {summary.strides} "
            f"([dim]{summary.converged_strides} converged[/dim])\n"
            f"[bold]Mean speed:[/bold] {format_speed(summary.mean_speed)}\n"
            f"[bold]Heel-off / opposite touchdown / toe-off:[/bold] "
            f"{format_percent(summary.heel_off_pct)} / "
            f"{format_percent(summary.opposite_touchdown_pct)} / "
            f"{format_percent(summary.toe_off_pct)}\n"
            f"[bold]GRF_y peak ratio:[/bold] {format_ratio(summary.peak_ratio)} "
            f"[dim](asymmetry {format_ratio(summary.asymmetry)})[/dim]\n"
            f"[bold]M-shaped strides:[/bold] {format_fraction(summary.m_shaped_fraction)}\n"
            f"[bold]Mean GRF_y / mg:[/bold] {format_ratio(summary.mean_grf_y_total, 4)}\n"
            f"[bold]Status:[/bold] "
            f"{format_fall(summary.fell, summary.fall_time, summary.fall_reason)}"
        )
        color = "red" if summary.fell else "cyan"
        self.console.print(Panel(content, title=title, border_style=color))

    def display_cycle_metrics(self, metrics: Sequence[CycleMetrics]):
        """Display the latest strides; transient ones are dimmed."""
        if not metrics:
            self.console.print_muted("No complete stride.")
            return
        table = Table(title="Cycle Metrics", show_header=True, header_style="bold")
        table.add_column("#", justify="right")
        table.add_column("Start", justify="right")
        table.add_column("Speed", justify="right")
        table.add_column("Heel-off", justify="right")
        table.add_column("Opp. TD", justify="right")
        table.add_column("Toe-off", justify="right")
        table.add_column("Peaks", justify="right")
        table.add_column("p1/p2", justify="right")

        for m in metrics[-MAX_CYCLE_ROWS:]:
            style = "transient" if m.transient else None
            table.add_row(
                str(m.index),
                format_seconds(m.t_start, 2),
                format_speed(m.average_speed),
                format_percent(m.heel_off_pct),
                format_percent(m.opposite_touchdown_pct),
                format_percent(m.toe_off_pct),
                str(m.peak_count),
                format_ratio(m.peak_ratio),
                style=style,
            )
        self.console.print(table)

    def display_energy(self, balances: Sequence[EnergyBalance]):
        if not balances:
            return
        worst = max(balances, key=lambda b: b.relative_error)
        self.console.print_muted(
            f"Energy balance over {len(balances)} strides: worst relative error "
            f"{format_scientific(worst.relative_error)} at t={format_seconds(worst.t_start, 2)}"
        )

    def display_sweep(self, report: SweepReport):
        """Display the per-case comparison of a sweep."""
        table = Table(title="Case Sweep", show_header=True, header_style="bold")
        table.add_column("Case", style="bold")
        table.add_column("Strides", justify="right")
        table.add_column("Speed", justify="right")
        table.add_column("p1/p2", justify="right")
        table.add_column("|p1/p2 - 1|", justify="right")
        table.add_column("Heel-off", justify="right")
        table.add_column("Toe-off", justify="right")
        table.add_column("Status")

        for row in report.rows:
            s = row.summary
            status = format_fall(s.fell, s.fall_time)
            table.add_row(
                row.label,
                str(s.strides),
                format_speed(s.mean_speed),
                format_ratio(s.peak_ratio),
                format_ratio(s.asymmetry),
                format_percent(s.heel_off_pct),
                format_percent(s.toe_off_pct),
                f"[fell]{status}[/fell]" if s.fell else f"[walking]{status}[/walking]",
            )
        self.console.print(table)

    def display_ankle_stabilization(self, report: AnkleStabilizationReport):
        """Display the outcome of every fixed placement offset."""
        self.console.print(
            Panel(
                f"[bold]Switch time:[/bold] {format_seconds(report.t_switch, 1)}  "
                f"[bold]End:[/bold] {format_seconds(report.t_end, 1)}\n"
                f"[bold]Speed before switch:[/bold] {format_speed(report.pre_switch_speed)}  "
                f"[bold]Placement before switch:[/bold] "
                f"{format_ratio(report.pre_switch_offset)} m",
                title="Ankle-only Stabilisation",
                border_style="cyan",
            )
        )
        table = Table(show_header=True, header_style="bold")
        table.add_column("Offset [m]", justify="right", style="bold")
        table.add_column("Strides", justify="right")
        table.add_column("Steady speed", justify="right")
        table.add_column("Change", justify="right")
        table.add_column("Converged")
        table.add_column("Status")

        for o in report.outcomes:
            converged = f"after {o.strides_to_converge}" if o.converged else "no"
            status = format_fall(o.fell, o.fall_time, o.fall_reason)
            table.add_row(
                f"{o.offset:.3f}",
                str(o.strides_after_switch),
                format_speed(o.steady_speed),
                format_percent(o.speed_change_pct, 2),
                converged,
                f"[fell]{status}[/fell]" if o.fell else f"[walking]{status}[/walking]",
            )
        self.console.print(table)

    def display_comparison(self, comparison: PointFootComparison):
        """Display ankle-foot and point-foot gaits side by side."""
        table = Table(title="Point-foot Comparison", show_header=True, header_style="bold")
        table.add_column("Metric", style="bold")
        table.add_column("Ankle-foot", justify="right")
        table.add_column("Point-foot", justify="right")

        a, p = comparison.ankle.summary, comparison.point_foot.summary
        table.add_row("Strides", str(a.strides), str(p.strides))
        table.add_row("Mean speed", format_speed(a.mean_speed), format_speed(p.mean_speed))
        table.add_row("GRF_y p1/p2", format_ratio(a.peak_ratio), format_ratio(p.peak_ratio))
        table.add_row(
            "Stance fraction",
            format_fraction(a.stance_fraction),
            format_fraction(p.stance_fraction),
        )
        table.add_row("Toe-off", format_percent(a.toe_off_pct), format_percent(p.toe_off_pct))
        table.add_row(
            "Status", format_fall(a.fell, a.fall_time), format_fall(p.fell, p.fall_time)
        )
        self.console.print(table)
        if comparison.partial:
            self.console.print_warning("A variant fell; the comparison is partial.")

    def display_perturbation(self, report: PerturbationReport):
        table = Table(
            title=f"Perturbation Δvx={report.delta_vx:+.3f} m/s at t={report.t_inject:g} s",
            show_header=True,
            header_style="bold",
        )
        table.add_column("Controller", style="bold")
        table.add_column("Max |Δvx|", justify="right")
        table.add_column("Recovered")
        table.add_column("Status")

        for o in report.outcomes:
            recovered = f"after {o.strides_to_recovery} strides" if o.recovered else "no"
            table.add_row(
                o.controller,
                format_speed(o.max_deviation),
                recovered,
                format_fall(o.fell, o.fall_time),
            )
        self.console.print(table)

    def display_return_map(self, result: ReturnMapResult):
        """Display the fixed point and the eigenvalue moduli of the stride map."""
        table = Table(title="Stride-map Fixed Point", show_header=True, header_style="bold")
        table.add_column("Coordinate", style="bold")
        table.add_column("Value", justify="right")
        for name, value in zip(result.coordinates, result.fixed_point):
            table.add_row(name, f"{value:.6f}")
        self.console.print(table)

        moduli = ", ".join(f"{m:.4f}" for m in result.eigenvalue_moduli)
        color = "green" if result.stable else "red"
        verdict = "stable" if result.stable else "unstable"
        self.console.print(
            Panel(
                f"[bold]Iterations:[/bold] {result.iterations} "
                f"[dim](residual {format_scientific(result.residual)})[/dim]\n"
                f"[bold]|eigenvalues|:[/bold] {moduli}\n"
                f"[bold]Spectral radius:[/bold] [{color}]{format_ratio(result.spectral_radius, 4)} "
                f"({verdict})[/{color}]",
                title="Stability",
                border_style=color,
            )
        )

    def display_outputs(self, paths: List[Path], root: Optional[Path] = None):
        """List the files written by a run."""
        if not paths:
            return
        self.console.print_subheader("Outputs")
        for path in paths:
            shown = path.relative_to(root) if root and path.is_relative_to(root) else path
            self.console.print_muted(f"  {shown}")
