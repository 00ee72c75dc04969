"""Limits of the digit probabilities along the tabulated subsequences.

Natural logarithms feed the subsequence limits; the generalized Benford
reference law uses base-10 logarithms.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Any

import numpy as np

from digitlaw.core.config import get_settings
from digitlaw.core.errors import InvalidParameterError
from digitlaw.digit_core import as_digit, as_position, lower_bound
from digitlaw.exact_law import (
    DIGITS,
    ModelParams,
    check_window,
    phi_index,
    prob_exact,
    psi_index,
    window_range,
)


class SumScope(Enum):
    GLOBAL = "global"
    WINDOWED = "windowed"


class LimitKind(Enum):
    ALPHA = "alpha"
    ALPHA_WINDOWED = "alpha_windowed"
    CENTRAL = "central"
    HILL = "hill"
    BENFORD = "benford"


@dataclass(frozen=True, slots=True)
class LogSumConstants:
    k_sum: float
    l_sum: float
    m_sum: float
    n_sum: float
    scope: SumScope
    d: int
    p: int
    window: int | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "k_sum": self.k_sum,
            "l_sum": self.l_sum,
            "m_sum": self.m_sum,
            "n_sum": self.n_sum,
            "scope": self.scope.value,
            "d": self.d,
            "p": self.p,
            "window": self.window,
        }


@dataclass(frozen=True, slots=True)
class LimitValue:
    value: float
    kind: LimitKind
    d: int
    p: int | None = None
    window: int | None = None

    def __post_init__(self) -> None:
        if not 0.0 < self.value < 1.0:
            raise InvalidParameterError(f"{self.kind.value} limit out of (0, 1): {self.value}")


@dataclass(slots=True)
class LimitRow:
    """One digit's row of a limit table; ``columns`` keeps insertion order."""

    d: int
    columns: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {"d": self.d, **self.columns}


def _check_position(p: int) -> int:
    p = as_position(p)
    cap = get_settings().max_position
    if p > cap:
        raise InvalidParameterError(f"asymptotic tables stop at p = {cap}, got {p}")
    return p


def _rise_terms(d: int, lo: int, hi: int) -> tuple[np.ndarray, np.ndarray]:
    """j and ln((10j + d + 1) / (10j + d)) for j = lo .. hi."""
    j = np.arange(lo, hi + 1, dtype=np.float64)
    return j, np.log1p(1.0 / (10.0 * j + d))


def _gap_terms(d: int, lo: int, hi: int) -> tuple[np.ndarray, np.ndarray]:
    """j and ln((10(j + 1) + d) / (10j + d + 1)) for j = lo .. hi."""
    j = np.arange(lo, hi + 1, dtype=np.float64)
    return j, np.log1p(9.0 / (10.0 * j + d + 1))


@lru_cache(maxsize=1024)
def logsum_constants(d: int, p: int, window: int | None = None) -> LogSumConstants:
    d = as_digit(d)
    p = _check_position(p)
    lo = 10 ** (p - 2)
    if window is None:
        upper, scope = 10 ** (p - 1) - 1, SumScope.GLOBAL
    else:
        upper, scope = check_window(p, window), SumScope.WINDOWED

    j_rise, rise = _rise_terms(d, lo, upper)
    j_gap, gap = _gap_terms(d, lo, upper - 1)
    return LogSumConstants(
        k_sum=math.fsum(rise),
        l_sum=math.fsum(j_rise * rise),
        m_sum=math.fsum(gap),
        n_sum=math.fsum(j_gap * gap),
        scope=scope,
        d=d,
        p=p,
        window=window,
    )


def _edge_logs(d: int, p: int) -> tuple[float, float]:
    base = lower_bound(p)
    low = math.log((base + d) / base)
    high = math.log(10**p / (10**p - 10 + d + 1))
    return low, high


@lru_cache(maxsize=256)
def alpha(d: int, p: int) -> LimitValue:
    """Limit of P(d, n, p) along n = 10**m - 1."""
    c = logsum_constants(d, p)
    low, high = _edge_logs(c.d, c.p)
    value = (
        0.1
        + (c.n_sum + c.m_sum - 9 * c.l_sum - c.d * c.k_sum) / (9 * lower_bound(c.p))
        + low / 90
        + high / 9
    )
    return LimitValue(value, LimitKind.ALPHA, c.d, c.p)


def _alpha_sub_value(alpha_value: float, d: int, p: int, i: int, c: LogSumConstants) -> float:
    base = lower_bound(p)
    offset = 10 ** (p - 2)
    low, _ = _edge_logs(d, p)
    numerator = (
        alpha_value * base
        + i
        + 1
        - offset
        - c.k_sum * d
        - 9 * c.l_sum
        + c.m_sum
        + c.n_sum
        + offset * low
    )
    return numerator / (10 * i + d + 1)


def alpha_sub(d: int, p: int, i: int) -> LimitValue:
    """Limit of P(d, n, p) along n = (10i + d + 1) * 10**(m-p+1) - 1."""
    c = logsum_constants(d, p, i)
    value = _alpha_sub_value(alpha(c.d, c.p).value, c.d, c.p, i, c)
    return LimitValue(value, LimitKind.ALPHA_WINDOWED, c.d, c.p, i)


@lru_cache(maxsize=256)
def central_value(d: int, p: int) -> LimitValue:
    """Mean of the windowed limits over every window i."""
    d = as_digit(d)
    p = _check_position(p)
    lo, hi = 10 ** (p - 2), 10 ** (p - 1) - 1

    # windowed sums for all i at once as prefix sums
    j_rise, rise = _rise_terms(d, lo, hi)
    j_gap, gap = _gap_terms(d, lo, hi)
    k_prefix = np.cumsum(rise)
    l_prefix = np.cumsum(j_rise * rise)
    m_prefix = np.concatenate(([0.0], np.cumsum(gap)[:-1]))
    n_prefix = np.concatenate(([0.0], np.cumsum(j_gap * gap)[:-1]))

    base = lower_bound(p)
    low, _ = _edge_logs(d, p)
    i = np.arange(lo, hi + 1, dtype=np.float64)
    numerators = (
        alpha(d, p).value * base
        + i
        + 1
        - lo
        - k_prefix * d
        - 9 * l_prefix
        + m_prefix
        + n_prefix
        + lo * low
    )
    values = numerators / (10 * i + d + 1)
    return LimitValue(math.fsum(values) / values.size, LimitKind.CENTRAL, d, p)


@lru_cache(maxsize=256)
def hill_prob(d: int, p: int) -> LimitValue:
    """Generalized Benford probability of digit d at position p."""
    d = as_digit(d)
    p = _check_position(p)
    window = window_range(p)
    _, rise = _rise_terms(d, window.start, window.stop - 1)
    return LimitValue(math.fsum(rise) / math.log(10), LimitKind.HILL, d, p)


def benford_first_digit(d: int) -> LimitValue:
    if isinstance(d, bool) or not isinstance(d, (int, np.integer)) or not 1 <= d <= 9:
        raise InvalidParameterError(f"first digit must lie in [1, 9], got {d!r}")
    return LimitValue(math.log10(1 + 1 / d), LimitKind.BENFORD, int(d), 1)


def default_orders(p: int) -> range:
    """Orders m tabulated next to the limits: p .. max(p, 5)."""
    return range(p, max(p, 5) + 1)


def limit_table(
    kind: str, p: int, *, i: int | None = None, orders: Sequence[int] | None = None
) -> list[LimitRow]:
    """Rows for d = 0..9 of one comparison table.

    ``alpha`` lists P at n = 10**m - 1 then the limit, ``alpha-sub`` lists P at the
    windowed indices then the windowed limit, ``central`` lists the central value
    next to the generalized Benford probability and ``hill`` only the latter.
    """

    p = _check_position(p)
    orders = list(orders) if orders is not None else list(default_orders(p))
    rows = [LimitRow(d) for d in DIGITS]

    if kind == "alpha":
        for row in rows:
            for m in orders:
                params = ModelParams(phi_index(m), p, row.d)
                row.columns[f"phi_{m}"] = prob_exact(params).value
            row.columns["alpha"] = alpha(row.d, p).value
    elif kind == "alpha-sub":
        if i is None:
            raise InvalidParameterError("alpha-sub tables need a window index i")
        check_window(p, i)
        for row in rows:
            for m in orders:
                params = ModelParams(psi_index(row.d, p, i, m), p, row.d)
                row.columns[f"psi_{m}"] = prob_exact(params).value
            row.columns["alpha_sub"] = alpha_sub(row.d, p, i).value
    elif kind == "central":
        for row in rows:
            row.columns["central"] = central_value(row.d, p).value
            row.columns["hill"] = hill_prob(row.d, p).value
    elif kind == "hill":
        for row in rows:
            row.columns["hill"] = hill_prob(row.d, p).value
    else:
        raise InvalidParameterError(f"unknown table kind {kind!r}")
    return rows
