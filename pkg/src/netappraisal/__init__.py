"""Macroscopic appraisal of interchange upgrades on urban road networks."""

__version__ = "0.1.0"
