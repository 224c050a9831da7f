"""Symbolic calculus for ends of locally finite graphs."""

__version__ = "0.1.0"
