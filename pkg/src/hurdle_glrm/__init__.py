"""Generalized low-rank models with composite hurdle loss."""

__version__ = "0.1.0"
