"""Numerical workbench for 1D nonlinear Schroedinger-type equations:
spectral grids, modified-energy multipliers, integrable ladders, time
integration, and Monte-Carlo checks of dispersive estimates."""

__version__ = "0.1.0"
