import numpy as np
import pandas as pd
import pytest

from app.models.state import LegId, PhaseId
from app.models.trace import TRACE_COLUMNS, EventKind, GaitTrace
from app.services.trace_io import (
    export_trace_csv,
    import_trace_csv,
    load_reference_gait,
    parse_event_label,
)
from app.utils.exceptions import ConfigurationError

GOLDEN_HEADER = (
    "t,x_m,y_m,vx,vy,phase,"
    "L_l,L_d_l,F_l,theta_l,tau_a_l,F_h_l,F_t_l,heel_x_l,heel_y_l,toe_x_l,toe_y_l,"
    "k_l,b_l,k_a_l,dx_target_l,theta_a_l,theta_f_l,"
    "L_r,L_d_r,F_r,theta_r,tau_a_r,F_h_r,F_t_r,heel_x_r,heel_y_r,toe_x_r,toe_y_r,"
    "k_r,b_r,k_a_r,dx_target_r,theta_a_r,theta_f_r,"
    "event"
)


def test_golden_header(tmp_path):
    empty = GaitTrace(frame=pd.DataFrame(columns=list(TRACE_COLUMNS)))
    path = export_trace_csv(empty, tmp_path / "nested" / "trace.csv")
    assert path.read_text(encoding="utf-8").splitlines()[0] == GOLDEN_HEADER


@pytest.mark.parametrize(
    "label,kind,leg",
    [
        ("Touchdown(r)", EventKind.TOUCHDOWN, LegId.RIGHT),
        ("HeelOff(l)", EventKind.HEEL_OFF, LegId.LEFT),
        ("Fall", EventKind.FALL, None),
    ],
)
def test_parse_event_label(label, kind, leg):
    assert parse_event_label(label) == (kind, leg)


def test_unknown_event_label():
    with pytest.raises(ConfigurationError):
        parse_event_label("Jump(l)")


def test_rejects_foreign_csv(tmp_path):
    path = tmp_path / "other.csv"
    path.write_text("a,b\n1,2\n", encoding="utf-8")
    with pytest.raises(ConfigurationError, match="not a trace file"):
        import_trace_csv(path)


@pytest.mark.slow
class TestTraceRoundTrip:
    def test_floats_are_bit_exact(self, short_trace, tmp_path):
        loaded = import_trace_csv(export_trace_csv(short_trace, tmp_path / "trace.csv"))
        assert len(loaded) == len(short_trace)
        for column in TRACE_COLUMNS:
            if column in ("phase", "event"):
                assert loaded.column(column).tolist() == short_trace.column(column).tolist()
            else:
                original = short_trace.column(column).astype(float)
                assert np.array_equal(loaded.column(column), original, equal_nan=True), column

    def test_events_are_rebuilt(self, short_trace, tmp_path):
        loaded = import_trace_csv(export_trace_csv(short_trace, tmp_path / "trace.csv"))
        assert [(e.kind, e.leg) for e in loaded.events] == [
            (e.kind, e.leg) for e in short_trace.events
        ]
        assert [e.t for e in loaded.events] == [e.t for e in short_trace.events]
        assert loaded.fall is None

    def test_phase_values(self, short_trace):
        assert set(short_trace.column("phase")) <= {p.value for p in PhaseId}


class TestReferenceGait:
    def test_loads_known_channels(self, tmp_path, caplog):
        path = tmp_path / "human.csv"
        path.write_text("percent,grf_y,cadence\n0,0.0,1\n50,1.1,1\n100,0.0,1\n", encoding="utf-8")
        reference = load_reference_gait(path)
        assert reference.percent == [0.0, 50.0, 100.0]
        assert reference.has("grf_y")
        assert not reference.has("cadence")
        assert "cadence" in caplog.text

    def test_requires_percent_column(self, tmp_path):
        path = tmp_path / "human.csv"
        path.write_text("grf_y\n0.0\n1.0\n", encoding="utf-8")
        with pytest.raises(ConfigurationError, match="percent"):
            load_reference_gait(path)

    def test_rejects_unsorted_axis(self, tmp_path):
        path = tmp_path / "human.csv"
        path.write_text("percent,grf_y\n50,1.0\n0,0.0\n", encoding="utf-8")
        with pytest.raises(ConfigurationError, match="increasing"):
            load_reference_gait(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError):
            load_reference_gait(tmp_path / "absent.csv")
