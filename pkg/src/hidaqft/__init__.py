"""Wick/Fock expansions, contraction integrals and causal splitting with a truncated-Fock oracle."""

__version__ = "0.1.0"
