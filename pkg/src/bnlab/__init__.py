"""Exact extension-space stratification on plane curves and numerical theta checks."""

__version__ = "0.1.0"
