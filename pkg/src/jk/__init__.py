"""Exact symbolic evaluation and verification of quantum K-theoretic J-functions."""

__version__ = "0.1.0"
