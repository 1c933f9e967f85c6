"""Exact computation and small-scale verification for cross t-intersecting families."""

__version__ = "0.1.0"
