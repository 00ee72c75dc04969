"""Compensated floating-point accumulation."""

from __future__ import annotations

import math
from collections.abc import Iterable

UNIT_ROUNDOFF = 2.0**-53


class CompensatedSum:
    """Running sum with Neumaier's compensation.

    Keeps a correction term for the low-order bits lost by each addition, so a
    long stream of additions stays accurate to a few ulps of the result.
    """

    __slots__ = ("_sum", "_carry", "count")

    def __init__(self, start: float = 0.0) -> None:
        self._sum = float(start)
        self._carry = 0.0
        self.count = 0

    def add(self, value: float) -> None:
        total = self._sum + value
        if abs(self._sum) >= abs(value):
            self._carry += (self._sum - total) + value
        else:
            self._carry += (value - total) + self._sum
        self._sum = total
        self.count += 1

    def extend(self, values: Iterable[float]) -> None:
        for value in values:
            self.add(value)

    @property
    def value(self) -> float:
        return self._sum + self._carry

    def error_bound(self) -> float:
        """A-priori bound on the accumulated rounding error."""
        return 2.0 * UNIT_ROUNDOFF * abs(self.value) + math.ulp(self.value)
