"""Closed-form probabilities: worked examples, properties, reference parity."""

from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from digitlaw.core.errors import InvalidParameterError, WorkCapExceededError
from digitlaw.exact_law import (
    ModelParams,
    ProbabilityValue,
    Provenance,
    TailIndices,
    distribution,
    level_sums,
    phi_index,
    prob_exact,
    psi_index,
    r_term,
    tail_indices,
)

WORKED_TOLERANCE = 5e-5


def _p(n: int, p: int, d: int) -> float:
    return prob_exact(ModelParams(n, p, d)).value


@pytest.mark.parametrize(
    ("n", "p", "d", "expected"),
    [
        (10003, 5, 2, 0.1458),
        (1113, 3, 1, 0.1028),
        (212, 2, 9, 0.0759),
        (99, 2, 0, 0.1330),
    ],
)
def test_worked_examples(n: int, p: int, d: int, expected: float) -> None:
    result = prob_exact(ModelParams(n, p, d))
    assert result.value == pytest.approx(expected, abs=WORKED_TOLERANCE)
    assert result.provenance is Provenance.CLOSED_FORM
    assert 0.0 < result.abs_error_bound < 1e-12


def test_single_face_puts_all_mass_on_zero() -> None:
    assert _p(10, 2, 0) == 1.0
    assert all(_p(10, 2, d) == 0.0 for d in range(1, 10))
    assert _p(100, 3, 0) == 1.0


@given(
    st.integers(min_value=2, max_value=3),
    st.integers(min_value=0, max_value=8),
    st.data(),
)
@settings(max_examples=60)
def test_digit_out_of_reach_has_zero_probability(p: int, a: int, data: st.DataObject) -> None:
    b = data.draw(st.integers(min_value=a + 1, max_value=9))
    assert _p(10 ** (p - 1) + a, p, b) == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize(
    ("n", "p", "d", "k", "l"),
    [(10003, 5, 2, -1, 1000), (1113, 3, 1, 0, 11), (212, 2, 9, 0, 1)],
)
def test_tail_indices(n: int, p: int, d: int, k: int, l: int) -> None:  # noqa: E741
    assert tail_indices(ModelParams(n, p, d)) == TailIndices(k=k, l=l)


def test_tail_term_of_smallest_worked_example() -> None:
    params = ModelParams(10003, 5, 2)
    # 0/1 + 0/2 + 1/3 + 1/4
    assert r_term(params) == pytest.approx(7 / 12, rel=1e-15)
    assert prob_exact(params).value == pytest.approx(7 / 48, rel=1e-15)


@given(st.integers(min_value=2, max_value=4), st.integers(min_value=0, max_value=200_000))
@settings(max_examples=60, deadline=None)
def test_probabilities_partition_unity(p: int, offset: int) -> None:
    n = 10 ** (p - 1) + offset
    assert sum(_p(n, p, d) for d in range(10)) == pytest.approx(1.0, abs=1e-10)


@given(st.integers(min_value=2, max_value=3), st.integers(min_value=9, max_value=150_000))
@settings(max_examples=60, deadline=None)
def test_smaller_digits_are_strictly_likelier(p: int, offset: int) -> None:
    n = 10 ** (p - 1) + offset
    values = [_p(n, p, d) for d in range(10)]
    assert all(a > b for a, b in zip(values, values[1:])), values


@pytest.mark.parametrize("offset", range(0, 9))
def test_smaller_digits_are_weakly_likelier_near_the_bottom(offset: int) -> None:
    for p in (2, 3):
        values = [_p(10 ** (p - 1) + offset, p, d) for d in range(10)]
        assert all(a >= b for a, b in zip(values, values[1:]))


REFERENCE_GRID = [
    (n, p, d)
    for n, p in [
        (10, 2),
        (19, 2),
        (99, 2),
        (100, 2),
        (212, 2),
        (999, 2),
        (1000, 2),
        (1113, 2),
        (2345, 2),
        (4999, 2),
        (100, 3),
        (109, 3),
        (999, 3),
        (1113, 3),
        (2999, 3),
        (3456, 3),
        (10003, 5),
        (10100, 5),
    ]
    for d in range(10)
]


@pytest.mark.parametrize(("n", "p", "d"), REFERENCE_GRID)
def test_matches_plain_loop_reference(n: int, p: int, d: int, reference_closed_form) -> None:
    assert _p(n, p, d) == pytest.approx(reference_closed_form(n, d, p), abs=1e-12)


def test_exact_rationals_agree_with_floats() -> None:
    for n, p, d in [(1113, 3, 1), (212, 2, 9), (99, 2, 0), (10, 2, 0)]:
        params = ModelParams(n, p, d)
        rational = prob_exact(params, exact=True)
        assert isinstance(rational.exact, Fraction)
        assert rational.value == float(rational.exact)
        assert rational.value == pytest.approx(prob_exact(params).value, abs=1e-15)
        assert rational.abs_error_bound <= 2.0**-53


def test_exact_rationals_limit_follows_settings(monkeypatch: pytest.MonkeyPatch) -> None:
    params = ModelParams(10003, 5, 2)
    with pytest.raises(WorkCapExceededError):
        prob_exact(params, exact=True)

    from digitlaw.core.config import get_settings

    monkeypatch.setenv("DIGITLAW_EXACT_RATIONAL_LIMIT", "20000")
    get_settings.cache_clear()
    result = prob_exact(params, exact=True)
    assert result.exact == Fraction(7, 48)
    assert result.to_dict()["exact"] == "7/48"


def test_level_sums_add_up_to_numerator() -> None:
    for n, p, d in [(1113, 3, 1), (212, 2, 9), (98765, 2, 4), (10003, 5, 2)]:
        params = ModelParams(n, p, d)
        sums = level_sums(params)
        idx = tail_indices(params)
        assert len(sums) == idx.k + 2
        assert [entry.is_tail for entry in sums] == [False] * (idx.k + 1) + [True]
        assert sums[-1].total == pytest.approx(r_term(params, idx), rel=1e-14)
        numerator = sum(entry.total for entry in sums)
        assert numerator / params.support_size == pytest.approx(prob_exact(params).value, abs=1e-13)


def test_work_cap_directs_to_scan() -> None:
    with pytest.raises(WorkCapExceededError) as excinfo:
        prob_exact(ModelParams(10**8, 2, 1))
    assert "prob_scan" in str(excinfo.value)
    assert excinfo.value.requested == 10**8 + 1 - 10

    with pytest.raises(WorkCapExceededError):
        prob_exact(ModelParams(5000, 2, 1), cap=100)


def test_oracle_cap_variable_also_caps_direct_evaluation(monkeypatch: pytest.MonkeyPatch) -> None:
    from digitlaw.core.config import get_settings

    monkeypatch.setenv("DIGITLAW_ORACLE_CAP", "500")
    get_settings.cache_clear()
    with pytest.raises(WorkCapExceededError):
        prob_exact(ModelParams(1000, 2, 1))
    assert prob_exact(ModelParams(212, 2, 9)).value == pytest.approx(0.0759, abs=WORKED_TOLERANCE)


@pytest.mark.parametrize(
    ("n", "p", "d"),
    [(9, 2, 0), (99, 3, 0), (12, 1, 0), (50, 2, 10), (50, 2, -1), (True, 2, 0), (50.0, 2, 0)],
)
def test_invalid_params_are_rejected(n, p, d) -> None:
    with pytest.raises(InvalidParameterError):
        ModelParams(n, p, d)


def test_invalid_parameter_error_is_a_value_error() -> None:
    with pytest.raises(ValueError):
        ModelParams(5, 2, 0)


def test_probability_value_range() -> None:
    with pytest.raises(InvalidParameterError):
        ProbabilityValue(1.5, Provenance.SCAN, 0.0)
    with pytest.raises(InvalidParameterError):
        ProbabilityValue(0.5, Provenance.SCAN, -1.0)
    record = ProbabilityValue(0.25, Provenance.ORACLE, 1e-17, ModelParams(20, 2, 3)).to_dict()
    assert record == {
        "value": 0.25,
        "provenance": "oracle",
        "abs_error_bound": 1e-17,
        "n": 20,
        "p": 2,
        "d": 3,
    }


def test_tabulated_indices() -> None:
    assert phi_index(2) == 99
    assert phi_index(5) == 99_999
    assert psi_index(0, 2, 7, 2) == 709
    assert psi_index(9, 2, 7, 3) == 7_999
    assert psi_index(0, 3, 23, 3) == 2_309
    with pytest.raises(InvalidParameterError):
        psi_index(0, 2, 10, 3)
    with pytest.raises(InvalidParameterError):
        psi_index(0, 3, 5, 3)
    with pytest.raises(InvalidParameterError):
        phi_index(0)


def test_distribution_uses_closed_form_under_cap() -> None:
    values = distribution(1113, 3)
    assert [v.params.d for v in values] == list(range(10))
    assert all(v.provenance is Provenance.CLOSED_FORM for v in values)
    assert values[1].value == pytest.approx(0.1028, abs=WORKED_TOLERANCE)
    assert sum(v.value for v in values) == pytest.approx(1.0, abs=1e-10)


def test_distribution_falls_back_to_scan_above_cap() -> None:
    fallback = distribution(5000, 2, cap=100)
    direct = distribution(5000, 2)
    assert all(v.provenance is Provenance.SCAN for v in fallback)
    for scanned, closed in zip(fallback, direct):
        assert scanned.value == pytest.approx(closed.value, abs=1e-10)
        assert scanned.abs_error_bound > 0.0


def test_distribution_respects_scan_cap(monkeypatch: pytest.MonkeyPatch) -> None:
    from digitlaw.core.config import get_settings

    monkeypatch.setenv("DIGITLAW_SCAN_CAP", "1000")
    get_settings.cache_clear()
    with pytest.raises(WorkCapExceededError):
        distribution(5000, 2, cap=100)
