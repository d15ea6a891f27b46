"""Figures from risee sweep aggregates: errorbar lines per scheme.

Consumes the aggregate CSV schema only; never imports the solver package.
"""

from .reader import AGGREGATE_HEADER, AggregateRow, read_aggregate
from .render import (
    AXIS_LABELS,
    CLOSED_FORM_SCHEMES,
    PANELS,
    SCHEME_LABELS,
    FigureSpec,
    collect_series,
    ordering_warnings,
    render,
)

__all__ = [
    "AGGREGATE_HEADER",
    "AggregateRow",
    "read_aggregate",
    "AXIS_LABELS",
    "CLOSED_FORM_SCHEMES",
    "PANELS",
    "SCHEME_LABELS",
    "FigureSpec",
    "collect_series",
    "ordering_warnings",
    "render",
]

__version__ = "0.1.0"
