"""Beam placement for a single LEO satellite as a geometric minimum clique cover."""

__version__ = "0.1.0"
