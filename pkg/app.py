from __future__ import annotations

from pathlib import Path

import streamlit as st

from engine import __version__
from engine.errors import BadSpec, ScenarioError
from engine.oracle import OracleSettings
from engine.pipeline import run_scenario
from engine.report import FORMATS, oracle_csv_text, render_report
from engine.scenario import parse_scenario


st.set_page_config(page_title="Monge-Ampere Scenario Runner", layout="wide")

st.title("Monge-Ampere and Segre current engine")
st.caption(f"engine {__version__}")

with st.sidebar:
    st.header("Settings")
    scenarios_dir = st.text_input("Scenario directory", value="scenarios")
    files = sorted(Path(scenarios_dir).glob("*.scn")) if Path(scenarios_dir).is_dir() else []
    picked = st.selectbox("Load scenario", options=["(none)"] + [f.name for f in files], index=0)
    fmt = st.selectbox("Report format", options=list(FORMATS), index=0)

    st.divider()
    st.subheader("Numerical oracle")
    radial_points = st.slider("Radial points", min_value=16, max_value=96, value=48, step=8)
    angular_points = st.slider("Angular points", min_value=16, max_value=32, value=16, step=4)
    max_points = st.number_input("Point budget", min_value=10_000, value=2_000_000, step=100_000)
    epsilon = st.number_input("Regularization epsilon", min_value=1e-6, max_value=1e-1, value=1e-3, format="%.6f")

default_text = ""
if picked != "(none)":
    default_text = (Path(scenarios_dir) / picked).read_text(encoding="utf-8")

st.subheader("Scenario")
text = st.text_area("Scenario text", value=default_text, height=320)
run = st.button("Run")

if run:
    try:
        scenario = parse_scenario(text)
    except ScenarioError as exc:
        st.error(f"line {exc.line}, column {exc.column}: {exc.rule}: {exc}")
        st.stop()
    try:
        settings = OracleSettings(
            radial_points=radial_points,
            angular_points=angular_points,
            max_points=int(max_points),
            epsilon=float(epsilon),
        )
    except BadSpec as exc:
        st.error(f"bad oracle settings: {exc}")
        st.stop()

    with st.spinner("Evaluating requests..."):
        report = run_scenario(scenario, settings)

    st.markdown("### Results")
    for result in report.results:
        if result.status == "ok":
            st.success(f"{result.label}: {result.output}")
        elif result.status == "fail":
            st.warning(f"{result.label}: {result.output}")
        else:
            st.error(f"{result.label}: {result.rule}: {result.output}")

    if report.oracle_rows:
        st.markdown("### Oracle rows")
        st.code(oracle_csv_text(report.oracle_rows), language="text")

    with st.expander("Full report", expanded=False):
        st.code(render_report(report, fmt).decode("utf-8"), language="json" if fmt == "json" else "text")
