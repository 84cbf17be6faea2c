"""Hybrid quantum-classical optimization orchestration."""

__version__ = "0.1.0"
