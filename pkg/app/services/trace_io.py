"""CSV export and import of traces, cycle metrics and reference gaits."""

from __future__ import annotations

import logging
import math
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import pandas as pd
from pydantic import ValidationError

from app.models.metrics import CURVE_CHANNELS, CycleMetrics, PointFootComparison
from app.models.scenario import ReferenceGait, validation_messages
from app.models.state import LegId, PhaseId
from app.models.trace import TRACE_COLUMNS, EventKind, EventRecord, FallMarker, GaitTrace
from app.services.events import lookup_transition
from app.utils.exceptions import ConfigurationError, TransitionError

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"
PathLike = Union[str, Path]

_EVENT_KINDS = {kind.value: kind for kind in EventKind}
_LEGS = {leg.value: leg for leg in LegId}
_TEXT_COLUMNS = ("phase", "event")


def export_trace_csv(trace: GaitTrace, path: PathLike) -> Path:
    """
    Write a trace with the fixed column order and 17 significant digits.

    Returns:
        The written path
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = trace.frame.reindex(columns=list(TRACE_COLUMNS))
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    logger.debug("Wrote %d trace rows to %s", len(frame), path)
    return path


def parse_event_label(label: str) -> tuple[EventKind, Optional[LegId]]:
    """Split ``"Touchdown(r)"`` into kind and leg."""
    name, _, rest = label.partition("(")
    kind = _EVENT_KINDS.get(name)
    if kind is None:
        raise ConfigurationError(f"Unknown event label '{label}'")
    leg = _LEGS.get(rest.rstrip(")")) if rest else None
    return kind, leg


def import_trace_csv(path: PathLike) -> GaitTrace:
    """
    Read a trace written by :func:`export_trace_csv`.

    Float columns are parsed round-trip exactly. Event records are rebuilt
    from the ``event`` column without their full walker states; a terminal
    event on the last row restores the fall marker.

    Raises:
        ConfigurationError: If the header differs from the trace schema
    """
    frame = pd.read_csv(
        path,
        float_precision="round_trip",
        dtype={"phase": str, "event": str},
        keep_default_na=False,
    )
    if tuple(frame.columns) != TRACE_COLUMNS:
        raise ConfigurationError(f"{path} is not a trace file: unexpected columns")
    frame = frame.astype({c: float for c in TRACE_COLUMNS if c not in _TEXT_COLUMNS})

    events: List[EventRecord] = []
    fall: Optional[FallMarker] = None
    phases = frame["phase"].tolist()
    labelled = [i for i, label in enumerate(frame["event"].tolist()) if label]
    for i in labelled:
        kind, leg = parse_event_label(frame.at[i, "event"])
        t = float(frame.at[i, "t"])
        phase_now = PhaseId(phases[i])
        phase_before = PhaseId(phases[i - 1]) if i > 0 else phase_now
        try:
            terminal = lookup_transition(phase_before, kind).terminal
        except TransitionError:
            terminal = False
        if terminal and i == len(frame) - 1:
            reason = lookup_transition(phase_before, kind).reason
            fall = FallMarker(t=t, reason=reason)
            phase_after = None
        else:
            phase_after = phase_now
        events.append(
            EventRecord(
                t=t,
                kind=kind,
                leg=leg,
                residual=math.nan,
                phase_before=phase_before,
                phase_after=phase_after,
            )
        )
    return GaitTrace(frame=frame, events=events, fall=fall)


def export_metrics_csv(metrics: Sequence[CycleMetrics], path: PathLike) -> List[Path]:
    """
    Write per-stride curves and scalars.

    ``path`` names the curve file (one row per cycle and percent sample);
    the scalar summary goes next to it with a ``_summary`` suffix.

    Returns:
        Paths of the curve file and the summary file
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frames = [
        pd.DataFrame({"cycle": m.index, "transient": m.transient, **m.curves.as_dict()})
        for m in metrics
    ]
    if frames:
        curves = pd.concat(frames, ignore_index=True)
    else:
        curves = pd.DataFrame(columns=["cycle", "transient", "percent", *CURVE_CHANNELS])
    curves.to_csv(path, index=False, float_format=FLOAT_FORMAT)

    summary_path = path.with_name(f"{path.stem}_summary{path.suffix}")
    summary = pd.DataFrame([_metrics_row(m) for m in metrics])
    summary.to_csv(summary_path, index=False, float_format=FLOAT_FORMAT)
    return [path, summary_path]


def _metrics_row(m: CycleMetrics) -> Dict[str, object]:
    row: Dict[str, object] = m.model_dump()
    row["duration"] = m.duration
    row["stance_fraction"] = m.stance_fraction
    row["m_shaped"] = m.m_shaped
    row["asymmetry"] = m.asymmetry
    return row


def export_comparison_csv(comparison: PointFootComparison, path: PathLike) -> Path:
    """Paired ankle / point-foot summary, one row per variant."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = []
    for result in (comparison.ankle, comparison.point_foot):
        row: Dict[str, object] = {"variant": result.variant, **result.summary.model_dump()}
        rep = result.representative
        row["representative_peak_ratio"] = rep.peak_ratio if rep else None
        row["representative_stance_fraction"] = rep.stance_fraction if rep else None
        rows.append(row)
    pd.DataFrame(rows).to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path


def load_reference_gait(path: PathLike) -> ReferenceGait:
    """
    Read a percent-normalised reference gait CSV.

    The file needs a ``percent`` column; any of the curve channels may be
    present. Other columns are ignored.

    Raises:
        ConfigurationError: If the file is unreadable or fails validation
    """
    try:
        frame = pd.read_csv(path)
    except (OSError, pd.errors.ParserError) as exc:
        raise ConfigurationError(f"Cannot read reference gait {path}: {exc}") from None
    if "percent" not in frame.columns:
        raise ConfigurationError(f"Reference gait {path} has no 'percent' column")
    channels = {c: frame[c].astype(float).tolist() for c in CURVE_CHANNELS if c in frame.columns}
    ignored = set(frame.columns) - set(channels) - {"percent"}
    if ignored:
        logger.warning("Ignoring reference columns %s", sorted(ignored))
    try:
        return ReferenceGait(
            percent=frame["percent"].astype(float).tolist(), channels=channels, source=str(path)
        )
    except ValidationError as exc:
        raise ConfigurationError(
            f"Invalid reference gait {path}: " + "; ".join(validation_messages(exc))
        ) from None
