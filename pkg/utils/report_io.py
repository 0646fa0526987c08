import csv
import io
import json
import logging
import math
import os
import tempfile
from pathlib import Path

from speclab.errors import ReportIOError
from speclab.experiments import ClaimResult, RunReport, Table

logger = logging.getLogger(__name__)

SIGNIFICANT_DIGITS = 15
FORMATS = ("csv", "json")
TIMINGS_FILE = "timings.json"


def _clean(value):
    """Round floats to 15 significant digits and map NaN/inf to None, recursively."""
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, float):
        if not math.isfinite(value):
            return None
        return float(format(value, f".{SIGNIFICANT_DIGITS}g"))
    if isinstance(value, dict):
        return {str(key): _clean(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(item) for item in value]
    if hasattr(value, "item"):
        return _clean(value.item())
    return str(value)


def format_cell(value) -> str:
    value = _clean(value)
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, f".{SIGNIFICANT_DIGITS}g")
    return str(value)


def parse_cell(text: str):
    if text == "":
        return None
    if text in ("true", "false"):
        return text == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def table_to_csv(table: Table) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(table.header)
    for row in table.rows:
        writer.writerow([format_cell(cell) for cell in row])
    return buffer.getvalue()


def report_to_json(report: RunReport) -> str:
    return json.dumps(_clean(report.to_dict()), indent=2, ensure_ascii=False) + "\n"


def write_atomic(path: Path, text: str) -> None:
    """Write text to path through a temporary file in the same directory."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, temp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
                handle.write(text)
            os.replace(temp, path)
        except BaseException:
            Path(temp).unlink(missing_ok=True)
            raise
    except OSError as exc:
        raise ReportIOError(f"cannot write {path}: {exc}") from exc


def emit_report(report: RunReport, out_dir: str | Path, formats: tuple[str, ...] = FORMATS) -> list[Path]:
    """Write `<experiment>.json` and `<experiment>_<table>.csv`; returns the written paths.

    Wall-clock time goes to timings.json so the report files depend on the
    configuration only.
    """
    unknown = set(formats) - set(FORMATS)
    if unknown:
        raise ValueError(f"unknown report formats: {', '.join(sorted(unknown))}")
    out_dir = Path(out_dir)
    written = []
    if "json" in formats:
        path = out_dir / f"{report.experiment}.json"
        write_atomic(path, report_to_json(report))
        written.append(path)
    if "csv" in formats:
        for name, table in report.tables.items():
            path = out_dir / f"{report.experiment}_{name}.csv"
            write_atomic(path, table_to_csv(table))
            written.append(path)
    record_timing(out_dir, report.experiment, report.elapsed)
    logger.info("wrote %d report files for %s to %s", len(written), report.experiment, out_dir)
    return written


def record_timing(out_dir: str | Path, experiment: str, elapsed: float) -> None:
    path = Path(out_dir) / TIMINGS_FILE
    timings = {}
    if path.exists():
        try:
            timings = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError):
            logger.warning("ignoring unreadable %s", path)
    timings[experiment] = round(float(elapsed), 3)
    write_atomic(path, json.dumps(dict(sorted(timings.items())), indent=2) + "\n")


def load_table(path: str | Path) -> Table:
    try:
        with open(path, encoding="utf-8", newline="") as handle:
            reader = csv.reader(handle)
            header = tuple(next(reader))
            rows = [tuple(parse_cell(cell) for cell in row) for row in reader]
    except (OSError, StopIteration) as exc:
        raise ReportIOError(f"cannot read table {path}: {exc}") from exc
    return Table(header, rows)


def load_report(path: str | Path) -> RunReport:
    """Inverse of emit_report: the JSON document plus its CSV tables."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ReportIOError(f"cannot read report {path}: {exc}") from exc
    try:
        experiment, config = data["experiment"], data["config"]
        statement, paper_ref = data["statement"], data["paper_ref"]
    except KeyError as exc:
        raise ReportIOError(f"report {path} has no field {exc}") from exc
    tables = {}
    for name, header in data.get("tables", {}).items():
        table_path = path.parent / f"{experiment}_{name}.csv"
        tables[name] = load_table(table_path) if table_path.exists() else Table(tuple(header), [])
    claims = [ClaimResult(**claim) for claim in data.get("claims", [])]
    return RunReport(experiment, statement, paper_ref, config, claims, tables, data.get("fits", {}))


def list_reports(out_dir: str | Path) -> list[Path]:
    """JSON reports in an output directory, by experiment name."""
    out_dir = Path(out_dir)
    if not out_dir.is_dir():
        return []
    return sorted(p for p in out_dir.glob("*.json") if p.name != TIMINGS_FILE)
