"""Extremal sumset computations in finite abelian groups."""

__version__ = "0.1.0"
