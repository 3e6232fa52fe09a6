"""Simulation of half-random biased Maker-Breaker games on complete graphs."""

__version__ = "0.1.0"
