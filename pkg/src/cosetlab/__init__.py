"""Exact tools for coset character transforms and free-field OPE verification."""

__version__ = "0.1.0"
