"""Exact computations with q-deformed Steenrod operators and q-harmonic polynomials."""

__version__ = "0.1.0"
