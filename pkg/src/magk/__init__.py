"""Magnetic equivariant K-theory calculations for finite magnetic groups."""

__version__ = "0.1.0"
