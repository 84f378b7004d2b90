"""Hamilton-Jacobi analysis of singular Lagrangians."""

__version__ = "0.1.0"
