"""Quantum information measures and two-party communication protocol simulation."""
__version__ = "0.1.0"
