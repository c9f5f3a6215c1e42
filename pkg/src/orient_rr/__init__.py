"""Exact symbolic Riemann-Roch for oriented cohomology theories."""

__version__ = "0.1.0"
