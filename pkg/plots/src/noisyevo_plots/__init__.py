"""Batch figure rendering for noisy-evo harness CSVs."""

__version__ = "0.1.0"

from .render import KINDS, FigureSpec, SchemaError, Series, render  # noqa: F401
