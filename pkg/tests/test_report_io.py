import json
import math

import numpy as np
import pytest

from speclab.errors import ReportIOError
from speclab.experiments import ClaimResult, RunReport, Table, at_most, equals, within
from utils.report_io import (
    TIMINGS_FILE,
    emit_report,
    format_cell,
    list_reports,
    load_report,
    load_table,
    parse_cell,
    report_to_json,
    table_to_csv,
    write_atomic,
)


@pytest.fixture
def report():
    return RunReport(
        experiment="weyl",
        statement="Weyl law",
        paper_ref="Weyl law for the counting function",
        config={"experiment": "weyl", "lambdas": [10.0, 20.0]},
        claims=[within("ratio", 0.98765432109876543, 1.0, 0.1),
                at_most("residual", np.float64(0.02), 0.1),
                equals("monotone", np.bool_(True), True)],
        tables={"counts": Table(("lambda", "count", "ratio", "ok"),
                                [(10.0, 314, 0.9994, True), (20.0, np.int64(1257), math.nan, False)])},
        fits={"weyl": {"exponent": np.float64(2.0), "missing": math.inf}},
        elapsed=1.23456,
    )


def test_cells():
    assert format_cell(True) == "true"
    assert format_cell(None) == ""
    assert format_cell(math.nan) == ""
    assert format_cell(np.float64(1 / 3)) == "0.333333333333333"
    assert format_cell(np.int64(7)) == "7"
    assert [parse_cell(text) for text in ("", "true", "7", "0.5", "dirichlet")] == \
        [None, True, 7, 0.5, "dirichlet"]


def test_csv_layout(report):
    text = table_to_csv(report.tables["counts"])
    lines = text.splitlines()
    assert lines[0] == "lambda,count,ratio,ok"
    assert lines[1] == "10,314,0.9994,true"
    assert lines[2] == "20,1257,,false"
    assert text.endswith("\n") and "\r" not in text


def test_json_document(report):
    data = json.loads(report_to_json(report))
    assert data["passed"] is True
    assert data["paper_ref"] == "Weyl law for the counting function"
    assert data["tables"] == {"counts": ["lambda", "count", "ratio", "ok"]}
    assert data["fits"]["weyl"] == {"exponent": 2.0, "missing": None}
    assert data["claims"][0]["measured"] == 0.987654321098765
    assert "elapsed" not in data


def test_json_is_deterministic(report):
    first = report_to_json(report)
    report.elapsed = 99.0
    assert report_to_json(report) == first


def test_emit_and_load(report, tmp_path):
    written = emit_report(report, tmp_path / "out")
    assert sorted(path.name for path in written) == ["weyl.json", "weyl_counts.csv"]
    timings = json.loads((tmp_path / "out" / TIMINGS_FILE).read_text(encoding="utf-8"))
    assert timings == {"weyl": 1.235}

    loaded = load_report(tmp_path / "out" / "weyl.json")
    assert loaded.passed
    assert loaded.claims[2] == ClaimResult("monotone", True, True, "equals", None, True, "")
    assert loaded.tables["counts"].rows[1] == (20.0, 1257, None, False)
    assert loaded.config == report.config
    assert loaded.paper_ref == report.paper_ref


def test_json_only(report, tmp_path):
    written = emit_report(report, tmp_path, formats=("json",))
    assert [path.name for path in written] == ["weyl.json"]
    assert load_report(tmp_path / "weyl.json").tables["counts"].rows == []
    with pytest.raises(ValueError):
        emit_report(report, tmp_path, formats=("xml",))


def test_timings_accumulate(report, tmp_path):
    emit_report(report, tmp_path)
    report.experiment = "bessel"
    emit_report(report, tmp_path)
    timings = json.loads((tmp_path / TIMINGS_FILE).read_text(encoding="utf-8"))
    assert list(timings) == ["bessel", "weyl"]
    assert [path.name for path in list_reports(tmp_path)] == ["bessel.json", "weyl.json"]


def test_list_reports_of_missing_directory(tmp_path):
    assert list_reports(tmp_path / "nowhere") == []


def test_write_atomic_replaces(tmp_path):
    path = tmp_path / "a" / "b.txt"
    write_atomic(path, "one")
    write_atomic(path, "two")
    assert path.read_text(encoding="utf-8") == "two"
    assert [p.name for p in path.parent.iterdir()] == ["b.txt"]


def test_unwritable_directory(report, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x", encoding="utf-8")
    with pytest.raises(ReportIOError):
        emit_report(report, blocker / "sub")


def test_unreadable_inputs(tmp_path):
    with pytest.raises(ReportIOError):
        load_report(tmp_path / "missing.json")
    empty = tmp_path / "empty.csv"
    empty.write_text("", encoding="utf-8")
    with pytest.raises(ReportIOError):
        load_table(empty)


def test_report_without_anchor_is_rejected(report, tmp_path):
    emit_report(report, tmp_path)
    path = tmp_path / "weyl.json"
    data = json.loads(path.read_text(encoding="utf-8"))
    del data["paper_ref"]
    path.write_text(json.dumps(data), encoding="utf-8")
    with pytest.raises(ReportIOError, match="paper_ref"):
        load_report(path)
