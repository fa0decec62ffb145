"""Exact computation with holomorphic Cliffordian functions."""

__version__ = "0.1.0"
