"""Filtered A-infinity structures over the Novikov ring."""

__version__ = "0.1.0"
