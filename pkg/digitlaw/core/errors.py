"""Exception families raised by digitlaw."""

from __future__ import annotations

from collections.abc import Sequence


class DigitLawError(Exception):
    pass


class InvalidParameterError(DigitLawError, ValueError):
    """A precondition on n, p, d, i, m or a run option does not hold."""


class WorkCapExceededError(DigitLawError):
    """A capped evaluation was asked to go past its configured cap."""

    def __init__(self, message: str, *, cap: int, requested: int) -> None:
        super().__init__(message)
        self.cap = cap
        self.requested = requested


class IngestError(DigitLawError):
    pass


class ColumnNotFoundError(IngestError):
    def __init__(self, column: str, available: Sequence[str]) -> None:
        self.column = column
        self.available = list(available)
        names = ", ".join(self.available) if self.available else "<none>"
        super().__init__(f"column {column!r} not found; available columns: {names}")


class NoEligibleValuesError(DigitLawError):
    pass
