"""Fit empirical p-th digit frequencies against candidate digit laws.

Laws:
- ``model``: the two-stage uniform law at bound n (defaults to the data maximum)
- ``hill``: the generalized Benford law
- ``uniform``: 1/10 per digit
- ``central``: the central values of the model, rescaled to sum to one

Records must be plain positive integers. Signed, decimal or non-numeric
records are counted as skipped; scale real-valued data to integers first.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Any

import numpy as np
import pandas as pd

from digitlaw.asymptotics import central_value, hill_prob
from digitlaw.core.errors import (
    ColumnNotFoundError,
    IngestError,
    InvalidParameterError,
    NoEligibleValuesError,
)
from digitlaw.core.logging import operation_log_context
from digitlaw.digit_core import INT64_SAFE_LIMIT, as_position, pth_digits
from digitlaw.exact_law import DIGITS, distribution

logger = logging.getLogger(__name__)

LAWS = ("model", "hill", "uniform", "central")
_INTEGER_PATTERN = r"[0-9]+"
_MAX_WIDTH = len(str(INT64_SAFE_LIMIT)) - 1


@dataclass(slots=True)
class Dataset:
    values: np.ndarray
    source_label: str
    skipped: int = 0

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.int64)
        if self.values.size and self.values.min() < 1:
            raise InvalidParameterError("dataset values must be positive integers")

    def __len__(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True, slots=True)
class DigitHistogram:
    p: int
    counts: tuple[int, ...]
    eligible: int
    max_value: int
    total: int

    @property
    def frequencies(self) -> tuple[float, ...]:
        return tuple(c / self.eligible for c in self.counts)

    def merge(self, other: DigitHistogram) -> DigitHistogram:
        if other.p != self.p:
            raise InvalidParameterError("cannot merge histograms of different positions")
        return DigitHistogram(
            p=self.p,
            counts=tuple(a + b for a, b in zip(self.counts, other.counts)),
            eligible=self.eligible + other.eligible,
            max_value=max(self.max_value, other.max_value),
            total=self.total + other.total,
        )


@dataclass(frozen=True, slots=True)
class LawFit:
    law: str
    expected: tuple[float, ...]
    chi_square: float
    mad: float

    def to_record(self) -> dict[str, Any]:
        record: dict[str, Any] = {"law": self.law, "chi_square": self.chi_square, "mad": self.mad}
        record.update({f"expected_{d}": value for d, value in enumerate(self.expected)})
        return record


@dataclass(frozen=True, slots=True)
class FitReport:
    p: int
    eligible: int
    entries: tuple[LawFit, ...]
    ranking: tuple[str, ...]
    n_used: int | None = None
    n_inferred: bool = False
    notes: tuple[str, ...] = field(default_factory=tuple)

    @property
    def best_law(self) -> str:
        return self.ranking[0]

    def entry(self, law: str) -> LawFit:
        for candidate in self.entries:
            if candidate.law == law:
                return candidate
        raise KeyError(law)

    def rank_of(self, law: str) -> int:
        return self.ranking.index(law) + 1

    def to_records(self) -> list[dict[str, Any]]:
        """One record per law in ranking order."""
        return [self.entry(law).to_record() for law in self.ranking]


def _read_frames(
    source: str | Path | IO[str], *, header: bool, delimiter: str, chunksize: int
) -> Iterable[pd.DataFrame]:
    return pd.read_csv(
        source,
        sep=delimiter,
        header=0 if header else None,
        dtype=str,
        keep_default_na=False,
        skip_blank_lines=True,
        chunksize=chunksize,
    )


def _select(frame: pd.DataFrame, column: str | int) -> pd.Series:
    names = [str(name) for name in frame.columns]
    if isinstance(column, int):
        if not 0 <= column < len(names):
            raise ColumnNotFoundError(str(column), names)
        return frame.iloc[:, column]
    if column in names:
        return frame.iloc[:, names.index(column)]
    if column.isdigit():
        return _select(frame, int(column))
    raise ColumnNotFoundError(column, names)


def _parse(series: pd.Series) -> tuple[np.ndarray, int]:
    text = series.astype(str).str.strip()
    ok = text.str.fullmatch(_INTEGER_PATTERN) & (text.str.len() <= _MAX_WIDTH)
    values = text[ok].astype(np.int64).to_numpy()
    values = values[values >= 1]
    return values, int(series.size - values.size)


def ingest(
    source: str | Path | IO[str],
    column: str | int = 0,
    *,
    header: bool = True,
    delimiter: str | None = None,
    chunksize: int = 100_000,
    label: str | None = None,
) -> Dataset:
    """Read one integer column from delimited text.

    ``column`` is a header name or a zero-based index. Without ``delimiter``,
    files ending in .tsv or .tab are read tab-separated, everything else with
    commas.
    """

    source_label = label or (str(source) if isinstance(source, (str, Path)) else "<stream>")
    if delimiter is None:
        suffix = Path(source).suffix.lower() if isinstance(source, (str, Path)) else ""
        delimiter = "\t" if suffix in (".tsv", ".tab") else ","

    with operation_log_context("ingest", source=source_label, column=column) as result:
        chunks: list[np.ndarray] = []
        skipped = 0
        records = 0
        try:
            for frame in _read_frames(
                source, header=header, delimiter=delimiter, chunksize=chunksize
            ):
                series = _select(frame, column)
                values, rejected = _parse(series)
                chunks.append(values)
                skipped += rejected
                records += int(series.size)
        except pd.errors.EmptyDataError as exc:
            raise IngestError(f"{source_label}: no records") from exc
        except (OSError, UnicodeDecodeError, pd.errors.ParserError) as exc:
            raise IngestError(f"cannot read {source_label}: {exc}") from exc

        if records == 0:
            raise IngestError(f"{source_label}: no records")
        if skipped:
            logger.warning(
                "ingest.skipped_records",
                extra={"event": {"source": source_label, "skipped": skipped, "records": records}},
            )
        values = np.concatenate(chunks) if chunks else np.empty(0, dtype=np.int64)
        result.update({"records": records, "skipped": skipped})
        return Dataset(values=values, source_label=source_label, skipped=skipped)


def histogram(ds: Dataset, p: int) -> DigitHistogram:
    p = as_position(p)
    digits = pth_digits(ds.values, p)
    digits = digits[digits >= 0]
    if digits.size == 0:
        raise NoEligibleValuesError(f"no p-digit values for p = {p} in {ds.source_label}")
    counts = np.bincount(digits, minlength=10)
    return DigitHistogram(
        p=p,
        counts=tuple(int(c) for c in counts),
        eligible=int(digits.size),
        max_value=int(ds.values.max()),
        total=len(ds),
    )


def _expected(law: str, p: int, n: int | None) -> tuple[float, ...]:
    if law == "model":
        assert n is not None
        return tuple(value.value for value in distribution(n, p))
    if law == "hill":
        return tuple(hill_prob(d, p).value for d in DIGITS)
    if law == "uniform":
        return (0.1,) * 10
    if law == "central":
        raw = [central_value(d, p).value for d in DIGITS]
        total = math.fsum(raw)
        return tuple(value / total for value in raw)
    raise InvalidParameterError(f"unknown law {law!r}; choose from {', '.join(LAWS)}")


def chi_square(counts: Sequence[int], expected: Sequence[float]) -> float:
    eligible = sum(counts)
    terms: list[float] = []
    for observed, prob in zip(counts, expected):
        mean = eligible * prob
        if mean == 0.0:
            if observed > 0:
                return math.inf
            continue
        terms.append((observed - mean) ** 2 / mean)
    return math.fsum(terms)


def mean_absolute_deviation(frequencies: Sequence[float], expected: Sequence[float]) -> float:
    return math.fsum(abs(f - e) for f, e in zip(frequencies, expected)) / 10


def fit(
    h: DigitHistogram, laws: Iterable[str] = LAWS, *, n: int | None = None
) -> FitReport:
    """Score each law against the histogram; ranking is by mad, ties keep the given order."""
    chosen = list(dict.fromkeys(laws))
    if not chosen:
        raise InvalidParameterError("no laws to fit")
    unknown = [law for law in chosen if law not in LAWS]
    if unknown:
        raise InvalidParameterError(f"unknown law {unknown[0]!r}; choose from {', '.join(LAWS)}")
    if h.eligible <= 0:
        raise NoEligibleValuesError("no p-digit values")

    n_used: int | None = None
    inferred = False
    notes: list[str] = []
    if "model" in chosen:
        if n is None:
            n_used, inferred = h.max_value, True
            notes.append(f"model bound inferred from data maximum n = {n_used}")
        else:
            if n < h.max_value:
                raise InvalidParameterError(
                    f"model bound n = {n} is below the data maximum {h.max_value}"
                )
            n_used = n

    with operation_log_context("fit", p=h.p, eligible=h.eligible, laws=chosen, n=n_used) as result:
        frequencies = h.frequencies
        entries = []
        for law in chosen:
            expected = _expected(law, h.p, n_used)
            entries.append(
                LawFit(
                    law=law,
                    expected=expected,
                    chi_square=chi_square(h.counts, expected),
                    mad=mean_absolute_deviation(frequencies, expected),
                )
            )
        ranking = tuple(entry.law for entry in sorted(entries, key=lambda entry: entry.mad))
        result["ranking"] = list(ranking)
        return FitReport(
            p=h.p,
            eligible=h.eligible,
            entries=tuple(entries),
            ranking=ranking,
            n_used=n_used,
            n_inferred=inferred,
            notes=tuple(notes),
        )
