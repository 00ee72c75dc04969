"""Ranking candidate digit laws against histograms."""

from __future__ import annotations

import math

import numpy as np
import pytest

from digitlaw.asymptotics import hill_prob
from digitlaw.audit import (
    LAWS,
    Dataset,
    DigitHistogram,
    chi_square,
    fit,
    histogram,
    mean_absolute_deviation,
)
from digitlaw.core.errors import InvalidParameterError
from digitlaw.exact_law import distribution
from digitlaw.oracle import SimulationConfig, draw_values


def _simulated(n: int, p: int, trials: int, seed: int) -> DigitHistogram:
    values = draw_values(SimulationConfig.build(n, p, trials=trials, seed=seed))
    return histogram(Dataset(values, f"simulated n={n}"), p)


def test_uniform_histogram_fits_uniform_law_exactly() -> None:
    h = histogram(Dataset(np.arange(10, 100), "range"), 2)
    report = fit(h, ["uniform", "hill", "central"])
    assert report.entry("uniform").mad == 0.0
    assert report.entry("uniform").chi_square == 0.0
    assert report.best_law == "uniform"
    assert report.n_used is None


def test_hill_shaped_histogram_ranks_hill_first() -> None:
    eligible = 1_000_000
    counts = tuple(round(hill_prob(d, 2).value * eligible) for d in range(10))
    h = DigitHistogram(p=2, counts=counts, eligible=sum(counts), max_value=10**6, total=sum(counts))
    report = fit(h)
    assert report.best_law == "hill"
    assert report.entry("hill").mad < 2e-6


def test_model_law_ranks_first_on_its_own_draws() -> None:
    h = _simulated(999, 2, trials=1_000_000, seed=2024)
    report = fit(h, n=999)
    assert report.best_law == "model"
    assert report.rank_of("model") < report.rank_of("hill")
    assert report.rank_of("model") < report.rank_of("uniform")
    assert report.n_used == 999
    assert not report.n_inferred


def test_model_law_ranks_above_hill_at_small_bound() -> None:
    h = _simulated(212, 2, trials=1_000_000, seed=8)
    report = fit(h, ["hill", "model"], n=212)
    assert report.rank_of("model") < report.rank_of("hill")


def test_simulated_frequencies_track_exact_law() -> None:
    h = _simulated(999, 2, trials=100_000, seed=17)
    expected = [v.value for v in distribution(999, 2)]
    for observed, prob in zip(h.frequencies, expected):
        spread = math.sqrt(prob * (1 - prob) / h.eligible)
        assert abs(observed - prob) <= 4 * spread


def test_model_fit_sharpens_with_more_trials() -> None:
    small = fit(_simulated(999, 2, trials=10_000, seed=5), ["model"], n=999)
    large = fit(_simulated(999, 2, trials=1_000_000, seed=5), ["model"], n=999)
    assert large.entry("model").mad < small.entry("model").mad


def test_bound_defaults_to_data_maximum() -> None:
    h = histogram(Dataset(np.array([10, 11, 25, 212]), "small"), 2)
    report = fit(h)
    assert report.n_used == 212
    assert report.n_inferred
    assert any("212" in note for note in report.notes)


def test_bound_below_data_maximum_is_rejected() -> None:
    h = histogram(Dataset(np.array([10, 11, 25, 212]), "small"), 2)
    with pytest.raises(InvalidParameterError):
        fit(h, n=100)


def test_unknown_or_empty_law_selection() -> None:
    h = histogram(Dataset(np.arange(10, 100), "range"), 2)
    with pytest.raises(InvalidParameterError):
        fit(h, ["benford"])
    with pytest.raises(InvalidParameterError):
        fit(h, [])


def test_scaling_counts_keeps_ranking() -> None:
    base = _simulated(212, 2, trials=20_000, seed=3)
    scaled = DigitHistogram(
        p=base.p,
        counts=tuple(7 * c for c in base.counts),
        eligible=7 * base.eligible,
        max_value=base.max_value,
        total=7 * base.total,
    )
    first = fit(base, n=212)
    second = fit(scaled, n=212)
    assert first.ranking == second.ranking
    for law in LAWS:
        assert second.entry(law).mad == pytest.approx(first.entry(law).mad, rel=1e-12)
        assert second.entry(law).chi_square == pytest.approx(
            7 * first.entry(law).chi_square, rel=1e-9
        )


def test_expected_vectors_are_distributions() -> None:
    h = _simulated(212, 2, trials=5_000, seed=1)
    report = fit(h, n=5_000)
    for entry in report.entries:
        assert math.fsum(entry.expected) == pytest.approx(1.0, abs=1e-9)
        assert entry.chi_square >= 0.0
        assert entry.mad >= 0.0


def test_records_follow_ranking_with_fixed_fields() -> None:
    h = histogram(Dataset(np.arange(10, 100), "range"), 2)
    report = fit(h, n=99)
    records = report.to_records()
    assert [r["law"] for r in records] == list(report.ranking)
    assert list(records[0]) == ["law", "chi_square", "mad"] + [f"expected_{d}" for d in range(10)]


def test_chi_square_with_impossible_digit() -> None:
    assert chi_square([1, 1] + [0] * 8, [1.0] + [0.0] * 9) == math.inf
    assert chi_square([2] + [0] * 9, [1.0] + [0.0] * 9) == 0.0
    assert mean_absolute_deviation([0.5, 0.5], [1.0, 0.0]) == pytest.approx(0.1)
