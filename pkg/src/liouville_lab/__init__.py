"""Numerical verification toolkit for sphere-covering mass bounds."""

__version__ = "0.1.0"
