"""Khovanov homology, the Lee spectral sequence and knight-move audits for knot diagrams."""
from .errors import (
    BudgetExceeded,
    InvariantViolation,
    KnightMoveError,
    NotAKnotError,
    PDParseError,
    ValidationError,
)
from .grading import DimTable, Laurent1, Laurent2, graded_euler, poincare_series
from .knotio import Diagram, TwistSpec, catalog_get, from_braid, insert_full_twist, parse_pd

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded",
    "InvariantViolation",
    "KnightMoveError",
    "NotAKnotError",
    "PDParseError",
    "ValidationError",
    "DimTable",
    "Laurent1",
    "Laurent2",
    "graded_euler",
    "poincare_series",
    "Diagram",
    "TwistSpec",
    "catalog_get",
    "from_braid",
    "insert_full_twist",
    "parse_pd",
]
