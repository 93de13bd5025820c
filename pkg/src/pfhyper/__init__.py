"""Polarisation-frequency hyperentanglement from interfering collinear pair sources."""

__version__ = "0.1.0"
