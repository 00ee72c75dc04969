"""Exact probability that the p-th digit of a two-stage uniform draw equals d.

The closed form splits [10**(p-1), n] into runs of consecutive integers. Within
a run the running count of p-th digits equal to d is either constant (a run of
other digits) or grows by one per integer (a run of digit d), so each run
contributes ``sum((slope*b + intercept) / (b + 1 - 10**(p-1)))`` and can be
evaluated as one vectorised block.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Any

import numpy as np

from digitlaw.core.config import get_settings
from digitlaw.core.errors import InvalidParameterError, WorkCapExceededError
from digitlaw.core.logging import operation_log_context
from digitlaw.core.summation import UNIT_ROUNDOFF, CompensatedSum
from digitlaw.digit_core import (
    INT64_SAFE_LIMIT,
    as_digit,
    as_position,
    lower_bound,
    num_digits,
    pth_digit,
    pth_digits,
    top_level,
)

logger = logging.getLogger(__name__)

DIGITS = tuple(range(10))
SCAN_CHUNK = 8192


class Provenance(Enum):
    CLOSED_FORM = "closed_form"
    RECURSION = "recursion"
    SCAN = "scan"
    ORACLE = "oracle"
    MONTE_CARLO = "monte_carlo"


@dataclass(frozen=True, slots=True)
class ModelParams:
    """One probability query: upper bound n, digit position p, digit value d."""

    n: int
    p: int
    d: int

    def __post_init__(self) -> None:
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)):
            raise InvalidParameterError(f"n must be an integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "p", as_position(self.p))
        object.__setattr__(self, "d", as_digit(self.d))
        if self.n < self.base:
            raise InvalidParameterError(
                f"n must be at least 10**(p-1) = {self.base} for p = {self.p}, got {self.n}"
            )

    @property
    def base(self) -> int:
        return lower_bound(self.p)

    @property
    def support_size(self) -> int:
        """Number of faces of the first die, n + 1 - 10**(p-1)."""
        return self.n + 1 - self.base

    def with_digit(self, d: int) -> ModelParams:
        return ModelParams(self.n, self.p, d)

    def to_dict(self) -> dict[str, int]:
        return {"n": self.n, "p": self.p, "d": self.d}


@dataclass(frozen=True, slots=True)
class TailIndices:
    k: int
    l: int  # noqa: E741


@dataclass(frozen=True, slots=True)
class ProbabilityValue:
    value: float
    provenance: Provenance
    abs_error_bound: float
    params: ModelParams | None = None
    exact: Fraction | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.value <= 1.0:
            raise InvalidParameterError(f"probability out of range: {self.value}")
        if self.abs_error_bound < 0.0:
            raise InvalidParameterError("error bound must be non-negative")

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            "value": self.value,
            "provenance": self.provenance.value,
            "abs_error_bound": self.abs_error_bound,
        }
        if self.params is not None:
            data.update(self.params.to_dict())
        if self.exact is not None:
            data["exact"] = f"{self.exact.numerator}/{self.exact.denominator}"
        return data


@dataclass(frozen=True, slots=True)
class SeriesPoint:
    n: int
    probs: tuple[float, ...]

    @property
    def log10_n(self) -> float:
        return math.log10(self.n)

    def to_dict(self, *, logx: bool = False) -> dict[str, Any]:
        row: dict[str, Any] = {"n": self.n}
        row.update({f"P_{digit}": prob for digit, prob in enumerate(self.probs)})
        if logx:
            row["log10_n"] = self.log10_n
        return row


@dataclass(frozen=True, slots=True)
class LevelSum:
    """Contribution of one decade of second draws to the closed-form numerator.

    ``digit_runs`` sums the terms of integers whose p-th digit is d, ``other_runs``
    the terms of all other integers. The tail entry (``is_tail``) covers
    [10**(p+k), n] and may be incomplete.
    """

    level: int
    digit_runs: float
    other_runs: float
    is_tail: bool = False

    @property
    def total(self) -> float:
        return self.digit_runs + self.other_runs


@dataclass(frozen=True, slots=True)
class _Run:
    first: int
    last: int
    slope: int
    intercept: int

    @property
    def size(self) -> int:
        return self.last - self.first + 1


def phi_index(m: int) -> int:
    """The tabulated index 10**m - 1."""
    if m < 1:
        raise InvalidParameterError(f"m must be positive, got {m}")
    return 10**m - 1


def window_range(p: int) -> range:
    """Admissible window indices i = 10**(p-2) .. 10**(p-1) - 1."""
    return range(10 ** (p - 2), 10 ** (p - 1))


def check_window(p: int, i: int) -> int:
    if i not in window_range(p):
        raise InvalidParameterError(
            f"window index i must lie in [{10 ** (p - 2)}, {10 ** (p - 1) - 1}] for p = {p}, got {i}"
        )
    return i


def psi_index(d: int, p: int, i: int, m: int) -> int:
    """The windowed index (10i + d + 1) * 10**(m-p+1) - 1."""
    d = as_digit(d)
    p = as_position(p)
    check_window(p, i)
    if m < p - 1:
        raise InvalidParameterError(f"m must be at least p - 1 = {p - 1}, got {m}")
    return (10 * i + d + 1) * 10 ** (m - p + 1) - 1


def tail_indices(params: ModelParams) -> TailIndices:
    p, d, n = params.p, params.d, params.n
    k = top_level(n, p)
    l = (n - (params.base + d) * 10 ** (k + 1)) // 10 ** (k + 2) + 10 ** (p - 2)  # noqa: E741
    return TailIndices(k=k, l=l)


def _digit_run(j: int, d: int, scale: int, offset: int, last: int | None = None) -> _Run:
    first = (10 * j + d) * scale
    end = first + scale - 1 if last is None else min(last, first + scale - 1)
    return _Run(first, end, 1, -((9 * j + d) * scale + offset - 1))


def _full_level_runs(p: int, d: int, level: int) -> Iterator[_Run]:
    scale = 10**level
    offset = 10 ** (p - 2)
    low_edge = 10 ** (p - 1 + level)
    high_edge = 10 ** (p + level) - 1
    for j in range(offset, 10 ** (p - 1)):
        yield _digit_run(j, d, scale, offset)
    for j in range(offset - 1, 10 ** (p - 1)):
        first = max(low_edge, (10 * j + d + 1) * scale)
        last = min(high_edge, (10 * (j + 1) + d) * scale - 1)
        if first <= last:
            yield _Run(first, last, 0, scale * (j + 1) - offset)


def _tail_runs(params: ModelParams, idx: TailIndices) -> Iterator[_Run]:
    p, d, n = params.p, params.d, params.n
    scale = 10 ** (idx.k + 1)
    offset = 10 ** (p - 2)
    low_edge = 10 ** (p + idx.k)
    ends_on_digit = pth_digit(n, p) == d

    for j in range(offset, idx.l + 1):
        run = _digit_run(j, d, scale, offset, last=n if ends_on_digit else None)
        if run.first <= run.last:
            yield run

    stop = idx.l if ends_on_digit else idx.l + 1
    for j in range(offset - 1, stop):
        first = max(low_edge, (10 * j + d + 1) * scale)
        last = (10 * (j + 1) + d) * scale - 1
        if not ends_on_digit:
            last = min(n, last)
        if first <= last:
            yield _Run(first, last, 0, scale * (j + 1) - offset)


def _run_sum(run: _Run, base: int) -> float:
    b = np.arange(run.first, run.last + 1, dtype=np.float64)
    terms = (run.slope * b + run.intercept) / (b - (base - 1))
    return math.fsum(terms)


def _run_sum_exact(run: _Run, base: int) -> Fraction:
    # slope*b + intercept == slope*(b - base + 1) + (intercept + slope*(base - 1))
    shift = base - 1
    harmonic = sum((Fraction(1, t) for t in range(run.first - shift, run.last - shift + 1)), Fraction(0))
    return run.slope * run.size + (run.intercept + run.slope * shift) * harmonic


def _work_cap(cap: int | None) -> int:
    return cap if cap is not None else get_settings().direct_cap


def _closed_form_bound(value: float) -> float:
    # division per term, fsum per run, fsum over runs, final division
    return 4 * UNIT_ROUNDOFF * value + math.ulp(value)


def level_sums(params: ModelParams, *, cap: int | None = None) -> list[LevelSum]:
    """Per-decade split of the closed-form numerator, full decades first, tail last."""
    limit = _work_cap(cap)
    if params.support_size > limit:
        raise WorkCapExceededError(
            f"closed form limited to {limit} terms; use prob_scan for n = {params.n}",
            cap=limit,
            requested=params.support_size,
        )
    idx = tail_indices(params)
    base = params.base
    sums: list[LevelSum] = []

    def _split(runs: Iterable[_Run], level: int, is_tail: bool) -> LevelSum:
        digit: list[float] = []
        other: list[float] = []
        for run in runs:
            (digit if run.slope else other).append(_run_sum(run, base))
        return LevelSum(level, math.fsum(digit), math.fsum(other), is_tail)

    for level in range(idx.k + 1):
        sums.append(_split(_full_level_runs(params.p, params.d, level), level, False))
    sums.append(_split(_tail_runs(params, idx), idx.k + 1, True))

    for entry in sums:
        logger.debug(
            "level.sum",
            extra={
                "event": {
                    "params": params.to_dict(),
                    "level": entry.level,
                    "digit_runs": entry.digit_runs,
                    "other_runs": entry.other_runs,
                    "is_tail": entry.is_tail,
                }
            },
        )
    return sums


def r_term(params: ModelParams, idx: TailIndices | None = None) -> float:
    """Tail numerator covering [10**(p+k), n]."""
    idx = idx if idx is not None else tail_indices(params)
    return math.fsum(_run_sum(run, params.base) for run in _tail_runs(params, idx))


def _all_runs(params: ModelParams, idx: TailIndices) -> Iterator[_Run]:
    for level in range(idx.k + 1):
        yield from _full_level_runs(params.p, params.d, level)
    yield from _tail_runs(params, idx)


def prob_exact(
    params: ModelParams, *, exact: bool = False, cap: int | None = None
) -> ProbabilityValue:
    """Closed-form P(D = d) for the two-stage uniform model.

    With ``exact=True`` the sum is carried out in rationals; this is limited to
    n <= ``exact_rational_limit``.
    """

    limit = _work_cap(cap)
    if params.support_size > limit:
        raise WorkCapExceededError(
            f"closed form limited to {limit} terms; use prob_scan for n = {params.n}",
            cap=limit,
            requested=params.support_size,
        )
    idx = tail_indices(params)

    with operation_log_context("prob_exact", exact=exact, **params.to_dict()) as result:
        if exact:
            rational_limit = get_settings().exact_rational_limit
            if params.n > rational_limit:
                raise WorkCapExceededError(
                    f"exact rationals limited to n <= {rational_limit}",
                    cap=rational_limit,
                    requested=params.n,
                )
            numerator = sum(
                (_run_sum_exact(run, params.base) for run in _all_runs(params, idx)), Fraction(0)
            )
            fraction = numerator / params.support_size
            value = float(fraction)
            bound = float(abs(fraction - Fraction(value)))
            result["value"] = value
            return ProbabilityValue(value, Provenance.CLOSED_FORM, bound, params, fraction)

        partials = [_run_sum(run, params.base) for run in _all_runs(params, idx)]
        value = min(1.0, math.fsum(partials) / params.support_size)
        result["value"] = value
        return ProbabilityValue(
            value, Provenance.CLOSED_FORM, _closed_form_bound(value), params
        )


@lru_cache(maxsize=256)
def _prefix_probability(p: int, d: int, m: int) -> float:
    """P at n = 10**m - 1, summed over complete decades only."""
    params = ModelParams(10**m - 1, p, d)
    numerator = math.fsum(
        _run_sum(run, params.base)
        for level in range(m - p + 1)
        for run in _full_level_runs(p, d, level)
    )
    return numerator / params.support_size


def prob_via_recursion(params: ModelParams, *, cap: int | None = None) -> ProbabilityValue:
    """Probability from the cached value at 10**(k+p) - 1 plus the tail term."""
    limit = _work_cap(cap)
    if params.support_size > limit:
        raise WorkCapExceededError(
            f"recursion limited to {limit} terms; use prob_scan for n = {params.n}",
            cap=limit,
            requested=params.support_size,
        )
    p, d, n = params.p, params.d, params.n
    with operation_log_context("prob_via_recursion", **params.to_dict()) as result:
        width = num_digits(n)
        if n + 1 == 10**width:
            # n = 10**m - 1 is itself an anchor
            value = _prefix_probability(p, d, width)
        else:
            idx = tail_indices(params)
            anchor = 0.0
            if idx.k >= 0:
                top = 10 ** (idx.k + p)
                anchor = _prefix_probability(p, d, idx.k + p) * (top - params.base)
            value = (anchor + r_term(params, idx)) / params.support_size
        value = min(1.0, value)
        result["value"] = value
        bound = 6 * UNIT_ROUNDOFF * value + math.ulp(value)
        return ProbabilityValue(value, Provenance.RECURSION, bound, params)


def emission_points(
    n_max: int, p: int, decimate: str | int | Iterable[int] | None = None
) -> np.ndarray:
    """Sorted n values a scan emits.

    ``None`` keeps every n below ``dense_scan_limit`` and log-spaced samples above
    it, always including 10**m - 1 and n_max. ``"none"`` keeps every n, an int
    keeps every step-th n, and an iterable names the n values explicitly.
    """

    base = lower_bound(p)
    if isinstance(decimate, str):
        if decimate not in ("none", "all"):
            raise InvalidParameterError(f"unknown decimation {decimate!r}")
        return np.arange(base, n_max + 1, dtype=np.int64)

    if isinstance(decimate, (int, np.integer)) and not isinstance(decimate, bool):
        if decimate < 1:
            raise InvalidParameterError(f"decimation step must be positive, got {decimate}")
        points = np.arange(base, n_max + 1, int(decimate), dtype=np.int64)
        return np.union1d(points, np.array([n_max], dtype=np.int64))

    if decimate is not None:
        chosen = np.unique(np.asarray(list(decimate), dtype=np.int64))
        if chosen.size == 0:
            raise InvalidParameterError("explicit decimation list is empty")
        if chosen[0] < base or chosen[-1] > n_max:
            raise InvalidParameterError(f"decimation points must lie in [{base}, {n_max}]")
        return chosen

    settings = get_settings()
    dense_stop = min(n_max + 1, max(base, settings.dense_scan_limit))
    parts = [np.arange(base, dense_stop, dtype=np.int64)]
    if n_max >= dense_stop:
        start = max(dense_stop, base)
        decades = math.log10(n_max) - math.log10(start)
        count = max(2, math.ceil(decades * settings.log_points_per_decade) + 1)
        parts.append(np.floor(np.logspace(math.log10(start), math.log10(n_max), count)).astype(np.int64))
    anchors = [10**m - 1 for m in range(p, len(str(n_max)) + 1) if 10**m - 1 <= n_max]
    parts.append(np.asarray(anchors + [n_max], dtype=np.int64))
    points = np.unique(np.concatenate(parts))
    return points[(points >= base) & (points <= n_max)]


def prob_scan(
    n_max: int,
    p: int,
    *,
    decimate: str | int | Iterable[int] | None = None,
    chunk_size: int = SCAN_CHUNK,
) -> Iterator[SeriesPoint]:
    """Stream all ten probabilities for n = 10**(p-1) .. n_max in O(n_max) total work.

    Running counts and running sums are advanced in numpy chunks; the offset
    carried between chunks lives in a compensated accumulator per digit.
    """

    p = as_position(p)
    base = lower_bound(p)
    if n_max < base:
        raise InvalidParameterError(f"n_max must be at least 10**(p-1) = {base}, got {n_max}")
    if n_max >= INT64_SAFE_LIMIT:
        raise InvalidParameterError("n_max must stay below 10**18")
    if chunk_size < 1:
        raise InvalidParameterError("chunk_size must be positive")
    points = emission_points(n_max, p, decimate)
    return _scan(n_max, p, points, chunk_size)


def _scan(n_max: int, p: int, points: np.ndarray, chunk_size: int) -> Iterator[SeriesPoint]:
    base = lower_bound(p)
    axis = np.arange(10)
    counts = np.zeros(10, dtype=np.int64)
    offsets = [CompensatedSum() for _ in DIGITS]

    with operation_log_context("prob_scan", n_max=n_max, p=p, points=int(points.size)) as result:
        emitted = 0
        for start in range(base, n_max + 1, chunk_size):
            stop = min(start + chunk_size, n_max + 1)
            ns = np.arange(start, stop, dtype=np.int64)
            running = counts + np.cumsum(pth_digits(ns, p)[:, None] == axis, axis=0)
            sizes = (ns - (base - 1)).astype(np.float64)
            partial = np.cumsum(running / sizes[:, None], axis=0)

            lo, hi = np.searchsorted(points, [start, stop])
            if hi > lo:
                rows = points[lo:hi] - start
                carried = np.array([acc.value for acc in offsets])
                probs = (carried + partial[rows]) / sizes[rows, None]
                for n, row in zip(points[lo:hi].tolist(), probs.tolist()):
                    emitted += 1
                    yield SeriesPoint(n, tuple(row))

            counts = running[-1]
            for acc, chunk_total in zip(offsets, partial[-1].tolist()):
                acc.add(chunk_total)
        result["emitted"] = emitted


def scan_error_bound(value: float, chunk_size: int = SCAN_CHUNK) -> float:
    """A-priori bound for a scan value: sequential sums inside a chunk dominate."""
    return (chunk_size + 4) * UNIT_ROUNDOFF * value + math.ulp(value)


def distribution(n: int, p: int, *, cap: int | None = None) -> tuple[ProbabilityValue, ...]:
    """All ten probabilities at n: closed form under the work cap, scan endpoint above it."""
    first = ModelParams(n, p, 0)
    limit = _work_cap(cap)
    if first.support_size <= limit:
        return tuple(prob_exact(first.with_digit(d), cap=limit) for d in DIGITS)

    scan_limit = get_settings().scan_cap
    if n > scan_limit:
        raise WorkCapExceededError(
            f"distribution limited to n <= {scan_limit}", cap=scan_limit, requested=n
        )
    logger.info(
        "distribution.scan_fallback",
        extra={"event": {"n": n, "p": p, "cap": limit}},
    )
    (point,) = tuple(prob_scan(n, p, decimate=[n]))
    return tuple(
        ProbabilityValue(
            min(1.0, value), Provenance.SCAN, scan_error_bound(value), first.with_digit(d)
        )
        for d, value in enumerate(point.probs)
    )
