"""Compute-and-forward relay: coefficient selection, equation decoding and Monte Carlo sweeps."""

__version__ = "1.0.0"
