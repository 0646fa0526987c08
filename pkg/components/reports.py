import json
from pathlib import Path

import streamlit as st

from speclab.errors import ReportIOError
from utils.report_io import TIMINGS_FILE, list_reports, load_report


def show_reports():
    st.title("📊 Reports")

    out_dir = st.text_input("Report directory", value=st.session_state.get("report_dir", "reports"))
    st.session_state.report_dir = out_dir
    paths = list_reports(out_dir)
    if not paths:
        st.info(f"No reports in {out_dir}. Run `speclab all --out {out_dir}` or use Run Experiment.")
        return

    try:
        reports = [load_report(path) for path in paths]
    except ReportIOError as e:
        st.error(str(e))
        return

    st.dataframe([{"experiment": r.experiment, "passed": r.passed, "claims": len(r.claims),
                   "failed": len(r.failed_claims())} for r in reports], use_container_width=True)

    timings = Path(out_dir) / TIMINGS_FILE
    if timings.exists():
        with st.expander("Timings (s)"):
            st.json(json.loads(timings.read_text(encoding="utf-8")))

    names = [r.experiment for r in reports]
    chosen = st.selectbox("Experiment", names)
    report = reports[names.index(chosen)]
    st.caption(f"{report.statement} · checks: {report.paper_ref}")
    if not report.passed:
        st.warning("Failed: " + ", ".join(c.name for c in report.failed_claims()))
    st.dataframe([{"claim": c.name, "passed": c.passed, "measured": c.measured,
                   "comparison": c.comparison, "expected": json.dumps(c.expected), "note": c.note}
                  for c in report.claims], use_container_width=True)
    for name, table in report.tables.items():
        with st.expander(f"Table {name} ({len(table.rows)} rows)"):
            st.dataframe([dict(zip(table.header, row)) for row in table.rows], use_container_width=True)
    with st.expander("Configuration and fits"):
        st.json({"config": report.config, "fits": report.fits})


__all__ = ['show_reports']
