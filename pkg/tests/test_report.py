import csv
import io
import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cvlab.report import CSV_COLUMNS, CheckRecord, Report, compare, emit_report, report_to_json


@given(st.floats(allow_nan=False, allow_infinity=False), st.floats(allow_nan=False, allow_infinity=False))
def test_json_round_trips_doubles(measured, reference):
    rep = Report("x", [CheckRecord("c", measured=measured, reference=reference)])
    back = json.loads(report_to_json(rep))["checks"][0]
    assert back["measured"] == measured and back["reference"] == reference


def test_compare_with_fd_budget():
    assert compare("a", 1.0 + 1e-7, 1.0, 1e-6).passed
    assert not compare("a", 1.0 + 1e-7, 1.0, 1e-6, fd_error=1e-6).passed
    assert compare("a", 0.0, 0.0, 1e-6).rel_dev == 0.0


def test_overall_pass_ignores_diagnostics():
    rep = Report("s")
    rep.add(CheckRecord("ok", measured=1.0))
    rep.add(CheckRecord("diag", measured=1.0, passed=False, diagnostic=True))
    assert rep.passed
    rep.add(CheckRecord("bad", measured=1.0, passed=False))
    assert not rep.passed
    assert [c.name for c in rep.failures()] == ["bad"]
    assert rep["diag"].diagnostic


def test_numpy_values_serialise():
    rec = CheckRecord("np", measured=np.float64(2.5), inputs={"n": np.int64(3)},
                      extra={"arr": np.arange(3), "flag": np.bool_(True), "bad": float("nan")})
    d = json.loads(report_to_json(Report("s", [rec])))["checks"][0]
    assert d["inputs"] == {"n": 3}
    assert d["extra"] == {"arr": [0, 1, 2], "flag": True, "bad": "nan"}


def test_csv_one_row_per_check(tmp_path):
    rep = Report("s", [CheckRecord(f"c{i}", measured=float(i), reference=0.0, tol=1e-3) for i in range(4)])
    emit_report(rep, "csv", tmp_path / "r.csv")
    rows = list(csv.reader(io.StringIO((tmp_path / "r.csv").read_text())))
    assert tuple(rows[0][:len(CSV_COLUMNS)]) == CSV_COLUMNS
    assert len(rows) == 5
    assert float(rows[3][2]) == 2.0


def test_unknown_format(tmp_path):
    with pytest.raises(ValueError):
        emit_report(Report("s"), "xml", tmp_path / "r.xml")
