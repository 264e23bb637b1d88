"""Standalone renderer for the paper-style figure panels.

Consumes only the CSV files and JSON metadata sidecars written by the
`sim` command-line tool; no in-process coupling to the simulator.
"""
from .panels import PANELS, PanelSpec, render
from .errors import MissingColumnError, MissingInputError, PanelError

__version__ = "0.1.0"

__all__ = ["PANELS", "PanelSpec", "render", "MissingColumnError",
           "MissingInputError", "PanelError"]
