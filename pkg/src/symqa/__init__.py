"""Quantum annealing inside total-magnetization sectors."""

__version__ = "0.1.0"
