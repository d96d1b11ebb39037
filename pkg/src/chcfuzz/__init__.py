"""Metamorphic mutation fuzzing for Constrained Horn Clause solvers."""

__version__ = "0.1.0"
