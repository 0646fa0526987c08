import json

import streamlit as st

from speclab.errors import ConfigError, ReportIOError
from speclab.experiments import EXPERIMENT_REGISTRY, RunReport, run_experiment
from utils.config import BCS, DOMAINS, EXPERIMENTS, ExperimentConfig
from utils.report_io import emit_report

# Fields the form offers per experiment; the rest keep their defaults.
EDITABLE_FIELDS = {
    "growth": ("families", "count", "first"),
    "weyl": ("domain", "bc", "lambdas"),
    "multiplicity": ("l_max", "lam_sq", "lam_range"),
    "extremal": ("lam_sq", "grid"),
    "window_locality": ("domain", "eps", "K", "lambdas"),
    "carleman": ("lambdas",),
    "maxprinciple": ("lam_range",),
    "whispering": ("orders",),
    "averaging": (),
    "bessel": (),
}


def _initial_state() -> dict:
    return {"step": "experiment", "experiment": EXPERIMENTS[0], "params": {}, "report": None}


def _parse_list(text: str, cast):
    return [cast(item.strip()) for item in text.split(",") if item.strip()]


def _parameter_inputs(name: str, params: dict) -> dict:
    values = {}
    for key in EDITABLE_FIELDS[name]:
        current = params.get(key)
        if key == "domain":
            values[key] = st.selectbox("Domain", DOMAINS, index=DOMAINS.index(current or "disk"))
        elif key == "bc":
            values[key] = st.selectbox("Boundary condition", BCS, index=BCS.index(current or "dirichlet"))
        elif key in ("lambdas", "families", "orders", "lam_range"):
            shown = ", ".join(str(item) for item in current or [])
            text = st.text_input(f"{key} (comma separated)", value=shown)
            cast = {"lambdas": float, "lam_range": float, "orders": int, "families": str}[key]
            try:
                parsed = _parse_list(text, cast)
            except ValueError:
                st.error(f"Could not read {key}: {text}")
                parsed = current
            if parsed or key == "lambdas":
                values[key] = parsed
        elif key == "eps":
            values[key] = st.number_input("ε", min_value=0.01, value=float(current or 1.0))
        else:
            values[key] = int(st.number_input(key, min_value=0, value=int(current or 0), step=1))
    return values


def _show_report(report: RunReport):
    passed = sum(claim.passed for claim in report.claims)
    if report.passed:
        st.success(f"All {passed} claims passed")
    else:
        st.error(f"{len(report.claims) - passed} of {len(report.claims)} claims failed")
    st.caption(f"{report.statement} · checks: {report.paper_ref}")
    st.dataframe([{"claim": c.name, "passed": c.passed, "measured": c.measured,
                   "comparison": c.comparison, "expected": json.dumps(c.expected), "note": c.note}
                  for c in report.claims], use_container_width=True)
    for name, table in report.tables.items():
        with st.expander(f"Table {name} ({len(table.rows)} rows)"):
            st.dataframe([dict(zip(table.header, row)) for row in table.rows], use_container_width=True)
    if report.fits:
        with st.expander("Fits"):
            st.json(report.fits)


def show_runner():
    st.title("🧪 Run Experiment")

    if "run_state" not in st.session_state:
        st.session_state.run_state = _initial_state()
    run_state = st.session_state.run_state

    if run_state["step"] == "experiment":
        name = st.selectbox("Experiment", EXPERIMENTS, index=EXPERIMENTS.index(run_state["experiment"]))
        st.caption(EXPERIMENT_REGISTRY[name].statement)
        if st.button("Next"):
            run_state.update({"experiment": name, "params": dict(EXPERIMENT_REGISTRY[name].defaults),
                              "step": "parameters"})
            st.rerun()

    elif run_state["step"] == "parameters":
        if st.button("🔙 Back", key="back_parameters"):
            run_state["step"] = "experiment"
            st.rerun()
        name = run_state["experiment"]
        if not EDITABLE_FIELDS[name]:
            st.info("This experiment has no parameters.")
        values = _parameter_inputs(name, run_state["params"])
        threads = int(st.number_input("Threads", min_value=1, value=run_state["params"].get("threads", 1)))
        if st.button("Confirm parameters"):
            run_state["params"].update(values, threads=threads)
            run_state["step"] = "confirm"
            st.rerun()

    elif run_state["step"] == "confirm":
        if st.button("🔙 Back", key="back_confirm"):
            run_state["step"] = "parameters"
            st.rerun()
        try:
            config = ExperimentConfig.from_dict({"experiment": run_state["experiment"], **run_state["params"]})
        except ConfigError as e:
            st.error(f"Invalid configuration: {e}")
        else:
            st.json(config.to_dict())
            if st.button("Run"):
                try:
                    with st.spinner(f"Running {config.experiment}..."):
                        run_state["report"] = run_experiment(config)
                    run_state["config"] = config
                    run_state["step"] = "results"
                    st.rerun()
                except ConfigError as e:
                    st.error(f"Configuration outside the supported range: {e}")

    elif run_state["step"] == "results":
        report = run_state["report"]
        col1, col2 = st.columns(2)
        with col1:
            if st.button("🔁 New run"):
                st.session_state.run_state = _initial_state()
                st.rerun()
        with col2:
            out_dir = st.text_input("Output directory", value=run_state["config"].out)
            if st.button("💾 Save report"):
                try:
                    written = emit_report(report, out_dir)
                    st.success(f"Wrote {len(written)} files to {out_dir}")
                except ReportIOError as e:
                    st.error(str(e))
        _show_report(report)
