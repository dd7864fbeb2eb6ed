"""Rendering of mflab experiment CSVs into figures.

The scripts are display-only: every number they draw comes from a CSV
column written by the simulation CLI, never from recomputation.
"""

from .render import KINDS, MissingColumnError, PlotSpec, render

__all__ = ["KINDS", "MissingColumnError", "PlotSpec", "render"]

__version__ = "0.1.0"
