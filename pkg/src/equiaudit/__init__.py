"""Symmetry-mismatch audits and error lower bounds for invariant and
equivariant models on finite group actions."""

__version__ = "0.1.0"
