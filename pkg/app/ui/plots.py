"""SVG plots of cycle metrics and experiment reports."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from app.models.metrics import (  # noqa: E402
    CURVE_CHANNELS,
    AnkleStabilizationReport,
    CycleMetrics,
    PointFootComparison,
)
from app.models.scenario import ReferenceGait  # noqa: E402
from app.models.trace import GaitTrace  # noqa: E402
from app.services.analysis import converged  # noqa: E402

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

# Deterministic SVG element ids.
matplotlib.rcParams["svg.hashsalt"] = "ankle-walker"
matplotlib.rcParams["svg.fonttype"] = "none"
_SVG_METADATA = {"Date": None}

CHANNEL_LABELS: Dict[str, tuple[str, str]] = {
    "grf_x": ("Horizontal GRF", "GRF$_x$ / mg"),
    "grf_y": ("Vertical GRF", "GRF$_y$ / mg"),
    "delta_y_com": ("CoM height about its mean", "ΔY$_{CoM}$ [m]"),
    "leg_angle": ("Leg angle", "θ [rad]"),
    "ankle_moment": ("Ankle moment", "τ$_a$ [N·m]"),
}


def _save(fig: plt.Figure, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata=_SVG_METADATA)
    plt.close(fig)
    return path


def mean_curve(metrics: Sequence[CycleMetrics], channel: str) -> np.ndarray:
    return np.mean([m.curves.channel(channel) for m in metrics], axis=0)


def render_plots(
    metrics: Sequence[CycleMetrics],
    reference: Optional[ReferenceGait],
    directory: PathLike,
    label: str = "model",
) -> List[Path]:
    """
    One SVG per curve channel over percent of cycle.

    Converged strides are drawn thin with their mean on top; the reference
    gait is overlaid where it has the channel.

    Returns:
        Written paths, empty when there is no stride to draw
    """
    directory = Path(directory)
    steady = converged(metrics)
    if not steady:
        logger.warning("No cycle to plot")
        return []
    percent = steady[0].curves.percent
    paths = []
    for channel in CURVE_CHANNELS:
        title, ylabel = CHANNEL_LABELS[channel]
        fig, ax = plt.subplots(figsize=(6, 4))
        for m in steady:
            ax.plot(percent, m.curves.channel(channel), color="0.75", linewidth=0.6)
        ax.plot(percent, mean_curve(steady, channel), color="C0", linewidth=1.8, label=label)
        if reference is not None and reference.has(channel):
            ax.plot(
                reference.percent,
                reference.channels[channel],
                color="k",
                linestyle="--",
                linewidth=1.2,
                label="reference",
            )
        ax.set_title(title)
        ax.set_xlabel("Gait cycle [%]")
        ax.set_ylabel(ylabel)
        ax.set_xlim(0.0, 100.0)
        ax.grid(True, alpha=0.3)
        ax.legend(loc="best")
        paths.append(_save(fig, directory / f"{channel}.svg"))
    return paths


def render_velocity_plot(report: AnkleStabilizationReport, path: PathLike) -> Path:
    """Forward speed against time for every fixed offset, with the switch time marked."""
    fig, ax = plt.subplots(figsize=(10, 4))
    for name, trace in report.traces.items():
        if name == "pre-switch":
            continue
        ax.plot(trace.time, trace.column("vx"), linewidth=1.0, label=name)
    ax.axvline(report.t_switch, color="r", linewidth=1.2, label="placement control off")
    ax.set_title("Forward speed after switching to fixed foot placement")
    ax.set_xlabel("Time [s]")
    ax.set_ylabel("v$_x$ [m/s]")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best")
    return _save(fig, Path(path))


def render_comparison_plots(comparison: PointFootComparison, directory: PathLike) -> List[Path]:
    """Representative ankle-foot and point-foot cycles on shared axes, one SVG per channel."""
    directory = Path(directory)
    variants = [
        (r.variant, r.representative)
        for r in (comparison.ankle, comparison.point_foot)
        if r.representative is not None
    ]
    if not variants:
        logger.warning("Neither variant completed a stride; no comparison plots")
        return []
    paths = []
    for channel in CURVE_CHANNELS:
        title, ylabel = CHANNEL_LABELS[channel]
        fig, ax = plt.subplots(figsize=(6, 4))
        for name, metrics in variants:
            ax.plot(metrics.curves.percent, metrics.curves.channel(channel), label=name)
        ax.set_title(title)
        ax.set_xlabel("Gait cycle [%]")
        ax.set_ylabel(ylabel)
        ax.set_xlim(0.0, 100.0)
        ax.grid(True, alpha=0.3)
        ax.legend(loc="best")
        paths.append(_save(fig, directory / f"compare_{channel}.svg"))
    return paths


def render_speed_traces(traces: Dict[str, GaitTrace], path: PathLike, marker: float) -> Path:
    """Forward speed of several runs with one vertical time marker."""
    fig, ax = plt.subplots(figsize=(10, 4))
    for name, trace in traces.items():
        ax.plot(trace.time, trace.column("vx"), linewidth=1.0, label=name)
    ax.axvline(marker, color="r", linewidth=1.2)
    ax.set_xlabel("Time [s]")
    ax.set_ylabel("v$_x$ [m/s]")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best")
    return _save(fig, Path(path))
