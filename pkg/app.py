import logging

import streamlit as st

from components.homepage import show_homepage
from components.reports import show_reports
from components.runner import show_runner

st.set_page_config(
    page_title="speclab",
    page_icon="〰️",
    layout="wide"
)

st.markdown("""
    <style>
    .sidebar .sidebar-content {
        background-color: #1f2a44;
    }

    .separator {
        height: 1px;
        background-color: rgba(255, 255, 255, 0.2);
        margin: 1rem 0;
    }

    .logo-text {
        font-size: 1.5rem;
        font-weight: bold;
        text-align: center;
        padding: 1rem 0;
    }
    </style>
""", unsafe_allow_html=True)

if 'logging_configured' not in st.session_state:
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    st.session_state.logging_configured = True


def main():
    if 'page' not in st.session_state:
        st.session_state.page = 'home'
    with st.sidebar:
        st.markdown('<div class="logo-text">〰️ speclab</div>', unsafe_allow_html=True)
        st.markdown('<div class="separator"></div>', unsafe_allow_html=True)

        if st.button("🏠 Home", key="home_btn", help="Go to homepage", use_container_width=True):
            st.session_state.page = 'home'
            st.rerun()
        if st.button("🧪 Run Experiment", key="run_btn", help="Configure and run one experiment",
                     use_container_width=True):
            st.session_state.page = 'runner'
            st.rerun()
        if st.button("📊 Reports", key="reports_btn", help="Browse written reports", use_container_width=True):
            st.session_state.page = 'reports'
            st.rerun()

    if st.session_state.page == 'home':
        show_homepage()
    elif st.session_state.page == 'runner':
        show_runner()
    elif st.session_state.page == 'reports':
        show_reports()
    else:
        st.warning(f"Unknown page {st.session_state.page!r}")
        show_homepage()


if __name__ == "__main__":
    main()
