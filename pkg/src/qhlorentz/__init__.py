"""Exact symbolic toolkit for quasihomogeneous Lorentzian metrics in three dimensions."""

__version__ = "0.1.0"
