"""Exact spectral toolkit for periodic block Jacobi operators."""

__version__ = "0.1.0"
