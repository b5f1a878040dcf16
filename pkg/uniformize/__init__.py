"""Numerical uniformization of planar grid domains."""

__version__ = "0.1.0"
