import streamlit as st

from speclab.experiments import EXPERIMENT_REGISTRY


def show_homepage():
    st.title("〰️ speclab")

    col1, col2 = st.columns([2, 1])

    with col1:
        st.markdown("""
        ### Sup-norms of Laplace eigenfunctions
        Exact eigenfunctions on the torus, rectangle, disk and ball, and how
        large they can get compared with their L² norm.

        - 📈 Growth exponents along mode families
        - 🔢 Weyl counts and eigenvalue multiplicities
        - 🎯 Extremal eigenspace combinations
        - 🪟 Smoothed spectral sums and local Weyl ratios
        - 🧱 Boundary-layer maximum principle
        """)

        col3, col4 = st.columns(2)
        with col3:
            st.button("Run an experiment", on_click=lambda: setattr(st.session_state, 'page', 'runner'))
        with col4:
            st.button("Browse reports", on_click=lambda: setattr(st.session_state, 'page', 'reports'))

    with col2:
        st.subheader("Experiments")
        for name, experiment in EXPERIMENT_REGISTRY.items():
            st.markdown(f"**{name}**: {experiment.statement}")
