"""Domain error types.

All of them derive from :class:`ValueError` so callers that only care about invalid input can
catch a single type.
"""

from __future__ import annotations


class DatasetError(ValueError):
    """Invalid observation data, optionally pinned to a 1-based file line."""

    def __init__(self, message: str, *, line: int | None = None) -> None:
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class SingularDesignError(ValueError):
    """The normal-equation matrix of a design cannot be inverted safely."""

    def __init__(self, column: str, condition: float) -> None:
        self.column = column
        self.condition = condition
        super().__init__(
            f"design matrix is singular or ill-conditioned (cond={condition:.3g}); offending column: {column}"
        )


class SeriesError(ValueError):
    """A time series is too short or too degenerate to estimate a model from."""
