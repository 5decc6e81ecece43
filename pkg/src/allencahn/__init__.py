"""Explicit finite-difference Allen-Cahn solver with reference and stencil backends."""

__version__ = "0.1.0"
