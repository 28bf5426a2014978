"""Ultrastrong coupling in dimerized chains of two-level systems."""

__version__ = "0.1.0"
