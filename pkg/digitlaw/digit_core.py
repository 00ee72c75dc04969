"""Positional digit extraction and exact counting of p-th digits.

Everything here works on exact Python integers. Digit counts come from a
precomputed table of powers of ten, never from a floating-point logarithm, so
exact powers of ten cannot be misclassified.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import asdict, dataclass
from typing import Any

import numpy as np

from digitlaw.core.config import get_settings
from digitlaw.core.errors import InvalidParameterError, WorkCapExceededError


_TABLE_SIZE = 64
POWERS_OF_TEN: tuple[int, ...] = tuple(10**e for e in range(_TABLE_SIZE))

# int64 holds every integer below 10**18
_INT64_POWERS = np.array([10**e for e in range(19)], dtype=np.int64)
INT64_SAFE_LIMIT = 10**18


def as_digit(value: int) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise InvalidParameterError(f"digit must be an integer, got {value!r}")
    if not 0 <= value <= 9:
        raise InvalidParameterError(f"digit must lie in [0, 9], got {value}")
    return int(value)


def as_position(value: int) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise InvalidParameterError(f"position must be an integer, got {value!r}")
    if value < 2:
        raise InvalidParameterError(f"position p must be at least 2, got {value}")
    return int(value)


def lower_bound(p: int) -> int:
    """Smallest integer with p digits, 10**(p-1)."""
    return 10 ** (p - 1)


def num_digits(x: int) -> int:
    """Number of decimal digits of a positive integer."""
    if x < 1:
        raise InvalidParameterError(f"num_digits needs a positive integer, got {x}")
    if x < POWERS_OF_TEN[-1]:
        return bisect_right(POWERS_OF_TEN, x)
    return len(str(x))


def pth_digit(x: int, p: int) -> int | None:
    """The p-th most significant digit of x, or None when x has fewer than p digits."""
    if x < 1:
        raise InvalidParameterError(f"pth_digit needs a positive integer, got {x}")
    width = num_digits(x)
    if width < p:
        return None
    return (x // 10 ** (width - p)) % 10


def pth_digits(values: np.ndarray, p: int) -> np.ndarray:
    """Vectorised pth_digit; -1 marks values with fewer than p digits.

    Values must be positive and below 10**18.
    """
    arr = np.asarray(values, dtype=np.int64)
    if arr.size and (arr.min() < 1 or arr.max() >= INT64_SAFE_LIMIT):
        raise InvalidParameterError("pth_digits needs positive integers below 10**18")
    width = np.searchsorted(_INT64_POWERS, arr, side="right")
    shift = np.clip(width - p, 0, None)
    digits = (arr // _INT64_POWERS[shift]) % 10
    return np.where(width >= p, digits, -1)


@dataclass(frozen=True, slots=True)
class CountBreakdown:
    """Count of integers in [10**(p-1), m] whose p-th digit is d, split as in the closed form.

    ``complete_prefix_count`` covers [10**(p-1), 10**(p+k_q) - 1], ``tail_full_blocks``
    counts the complete runs of 10**(k_q+1) integers above 10**(p+k_q), and
    ``tail_partial`` the integers of the run that m itself sits in.
    """

    complete_prefix_count: int
    tail_full_blocks: int
    tail_partial: int
    k_q: int

    @property
    def block_length(self) -> int:
        return 10 ** (self.k_q + 1)

    @property
    def total(self) -> int:
        return self.complete_prefix_count + self.tail_full_blocks * self.block_length + self.tail_partial

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data["total"] = self.total
        return data


def top_level(m: int, p: int) -> int:
    """k_q: the largest k >= 0 with 10**(p+k) <= m, or -1 when there is none."""
    return num_digits(m) - p - 1


def count_pth_digit_upto(m: int, p: int, d: int) -> CountBreakdown:
    p = as_position(p)
    d = as_digit(d)
    base = lower_bound(p)
    if m < base:
        raise InvalidParameterError(f"m must be at least 10**(p-1) = {base}, got {m}")

    k_q = top_level(m, p)
    block = 10 ** (k_q + 1)
    prefix = 10 ** (p - 2) * (block - 1)

    # m // (10*block) holds the leading p-1 digits of m, (m // block) % 10 its p-th digit
    leading = m // (10 * block)
    digit = (m // block) % 10
    full = leading - 10 ** (p - 2) + (1 if digit > d else 0)
    partial = m - (10 * leading + d) * block + 1 if digit == d else 0
    return CountBreakdown(
        complete_prefix_count=prefix,
        tail_full_blocks=full,
        tail_partial=partial,
        k_q=k_q,
    )


def count_pth_digit_upto_oracle(m: int, p: int, d: int, *, cap: int | None = None) -> int:
    """Linear-scan count used as ground truth for count_pth_digit_upto."""
    p = as_position(p)
    d = as_digit(d)
    base = lower_bound(p)
    if m < base:
        raise InvalidParameterError(f"m must be at least 10**(p-1) = {base}, got {m}")
    limit = cap if cap is not None else get_settings().count_oracle_cap
    if m > limit:
        raise WorkCapExceededError(
            f"oracle count limited to m <= {limit}; use count_pth_digit_upto",
            cap=limit,
            requested=m,
        )
    return sum(1 for j in range(base, m + 1) if pth_digit(j, p) == d)
