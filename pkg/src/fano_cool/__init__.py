"""Steady-state mechanical cooling in Fano-mirror optomechanical cavities with coherent feedback."""

__version__ = "0.1.0"
