"""Exact mirror and T-duality computations for semi-flat generalized complex structures."""

__version__ = "0.1.0"
