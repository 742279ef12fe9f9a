"""Planar bifurcation toolkit: focus values, Bogdanov-Takens normal forms,
Melnikov predictions and simulation checks, with an SI epidemic model as the
built-in reference system."""

__version__ = "0.1.0"
