"""Sup-norm growth experiments for Laplace eigenfunctions on flat model domains."""
