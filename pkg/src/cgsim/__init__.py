"""Simulation of indicator distribution classes under adaptive data poisoning."""

__version__ = "0.1.0"
