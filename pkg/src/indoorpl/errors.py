"""Exception types shared across the package.

Every domain failure derives from PathLossError so callers (CLI, HTTP
service) can map the whole family to one error channel.
"""

from __future__ import annotations


class PathLossError(Exception):
    """Base class for all domain errors raised by this package."""


class DomainError(PathLossError):
    """Input outside a model's or operation's valid domain (e.g. d < 1 m)."""


class FloorMismatch(PathLossError):
    """Line-of-sight obstruction counting requested across floors."""


class MissingParameter(PathLossError):
    """A lookup table has no entry for the requested key and no custom value."""


class ParseError(PathLossError):
    """A measurement file row could not be parsed."""

    def __init__(self, row: int, column: str | None, reason: str):
        self.row = row
        self.column = column
        self.reason = reason
        where = f"row {row}" if column is None else f"row {row}, column {column!r}"
        super().__init__(f"{where}: {reason}")


class EmptyInput(PathLossError):
    """No data where at least one record/value is required."""


class InsufficientData(PathLossError):
    """Too few points to perform a fit."""


class DegenerateDesign(PathLossError):
    """The fit's design column is identically zero (no slope information)."""


class LengthMismatch(PathLossError):
    """Paired sequences have different lengths."""


class GeometryExhausted(PathLossError):
    """Rejection sampling failed to find a valid position."""


class DocumentFormatError(PathLossError):
    """A structured document (floor plan, parameter overrides) is malformed."""
