"""Spectral simulator for the 2D Dirac equation in a uniform magnetic field."""

__version__ = "0.1.0"
