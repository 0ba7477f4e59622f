"""Exact verification kit for a two-variable relative trace formula over F_q(t)."""

__version__ = "0.1.0"
