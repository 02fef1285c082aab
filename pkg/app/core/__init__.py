"""Numerical core: Hilbert-space arithmetic, grid functions and quadrature."""
