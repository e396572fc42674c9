"""Executable combinatorics for anti-Ramsey thresholds of random graphs."""

__version__ = "0.1.0"
