"""Exact root systems, Weyl groups and twisted root cone verification."""

__version__ = "0.1.0"
