"""Figure rendering for nearfocus CSV datasets.

Consumes only the emitted CSV files; never recomputes any physics.
"""
from __future__ import annotations

__version__ = "1.0.0"


class SchemaMismatch(Exception):
    """A dataset's header does not match the documented CSV schema."""

    def __init__(self, column: str, message: str) -> None:
        super().__init__(message)
        self.column = column


class EmptyPlotWarning(UserWarning):
    """A dataset parsed cleanly but holds no data rows."""


from .datasets import axis_label, read_header, read_table, sniff_kind  # noqa: E402
from .render import PlotSpec, load_spec, render  # noqa: E402

__all__ = [
    "EmptyPlotWarning",
    "PlotSpec",
    "SchemaMismatch",
    "axis_label",
    "load_spec",
    "read_header",
    "read_table",
    "render",
    "sniff_kind",
]
