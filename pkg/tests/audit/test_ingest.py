"""Delimited-text ingestion and p-th digit histograms."""

from __future__ import annotations

import io
import random
from pathlib import Path

import numpy as np
import pytest

from digitlaw.audit import Dataset, DigitHistogram, histogram, ingest
from digitlaw.core.errors import (
    ColumnNotFoundError,
    IngestError,
    InvalidParameterError,
    NoEligibleValuesError,
)


def _write(tmp_path: Path, name: str, text: str) -> Path:
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def test_ingest_plain_column(tmp_path: Path) -> None:
    path = _write(tmp_path, "amounts.csv", "amount\n10\n11\n12\n")
    ds = ingest(path, "amount")
    assert ds.values.tolist() == [10, 11, 12]
    assert ds.skipped == 0
    assert ds.source_label == str(path)
    assert len(ds) == 3


def test_ingest_counts_rejected_records(tmp_path: Path) -> None:
    path = _write(tmp_path, "mixed.csv", "amount\n10\n-3\nx\n12\n")
    ds = ingest(path, "amount")
    assert ds.values.tolist() == [10, 12]
    assert ds.skipped == 2


def test_ingest_rejects_signs_decimals_and_oversized_values() -> None:
    text = "v\n+5\n1.5\n1e3\n0\n 42 \n1234567890123456789012\n7\n"
    ds = ingest(io.StringIO(text), "v")
    assert ds.values.tolist() == [42, 7]
    assert ds.skipped == 5
    assert ds.source_label == "<stream>"


def test_ingest_skips_non_ascii_digits(tmp_path: Path) -> None:
    path = _write(tmp_path, "digits.csv", "v\n١٢\n１２\n४५\n12\n")
    ds = ingest(path, "v")
    assert ds.values.tolist() == [12]
    assert ds.skipped == 3


def test_ingest_selects_by_index_or_digit_string(tmp_path: Path) -> None:
    path = _write(tmp_path, "ledger.csv", "id,amount\na,150\nb,260\n")
    assert ingest(path, 1).values.tolist() == [150, 260]
    assert ingest(path, "1").values.tolist() == [150, 260]
    by_index = ingest(path, 0)
    assert by_index.values.size == 0
    assert by_index.skipped == 2


def test_ingest_without_header(tmp_path: Path) -> None:
    path = _write(tmp_path, "raw.csv", "5,300\n6,410\n")
    ds = ingest(path, 1, header=False)
    assert ds.values.tolist() == [300, 410]


def test_ingest_reads_tab_files(tmp_path: Path) -> None:
    path = _write(tmp_path, "ledger.tsv", "id\tamount\n1\t2024\n2\t17\n")
    assert ingest(path, "amount").values.tolist() == [2024, 17]
    other = _write(tmp_path, "ledger.txt", "id;amount\n1;99\n")
    assert ingest(other, "amount", delimiter=";").values.tolist() == [99]


def test_ingest_small_chunks_agree(tmp_path: Path) -> None:
    rows = "\n".join(str(v) for v in range(10, 500))
    path = _write(tmp_path, "range.csv", f"v\n{rows}\n")
    assert np.array_equal(ingest(path, "v", chunksize=7).values, ingest(path, "v").values)


def test_empty_file_has_no_records(tmp_path: Path) -> None:
    with pytest.raises(IngestError, match="no records"):
        ingest(_write(tmp_path, "empty.csv", ""))
    with pytest.raises(IngestError, match="no records"):
        ingest(_write(tmp_path, "header_only.csv", "amount\n"), "amount")


def test_missing_column_names_available_columns(tmp_path: Path) -> None:
    path = _write(tmp_path, "ledger.csv", "id,amount\na,150\n")
    with pytest.raises(ColumnNotFoundError) as excinfo:
        ingest(path, "total")
    assert excinfo.value.available == ["id", "amount"]
    assert "id, amount" in str(excinfo.value)
    with pytest.raises(ColumnNotFoundError):
        ingest(path, 5)


def test_unreadable_input(tmp_path: Path) -> None:
    with pytest.raises(IngestError):
        ingest(tmp_path / "missing.csv")
    binary = tmp_path / "blob.csv"
    binary.write_bytes(b"v\n\xff\xfe\x81\n")
    with pytest.raises(IngestError):
        ingest(binary)


def test_dataset_rejects_non_positive_values() -> None:
    with pytest.raises(InvalidParameterError):
        Dataset(values=np.array([3, 0]), source_label="test")


def test_histogram_of_all_two_digit_integers() -> None:
    h = histogram(Dataset(np.arange(10, 100), "range"), 2)
    assert h.counts == (9,) * 10
    assert h.eligible == 90
    assert h.max_value == 99
    assert h.frequencies == (0.1,) * 10


def test_histogram_skips_short_values() -> None:
    h = histogram(Dataset(np.array([1113, 7, 42]), "mixed"), 3)
    assert h.counts[1] == 1
    assert h.eligible == 1
    assert h.total == 3
    assert sum(h.counts) == h.eligible <= h.total


def test_histogram_without_eligible_values() -> None:
    with pytest.raises(NoEligibleValuesError, match="no p-digit values"):
        histogram(Dataset(np.array([5, 42]), "short"), 3)


def test_histogram_is_independent_of_row_order(tmp_path: Path) -> None:
    values = list(range(10, 5000, 7))
    shuffled = values[:]
    random.Random(3).shuffle(shuffled)
    first = _write(tmp_path, "a.csv", "v\n" + "\n".join(map(str, values)) + "\n")
    second = _write(tmp_path, "b.csv", "v\n" + "\n".join(map(str, shuffled)) + "\n")
    assert histogram(ingest(first, "v"), 2) == histogram(ingest(second, "v"), 2)


def test_histograms_merge_by_row_ranges() -> None:
    values = np.arange(100, 3000)
    whole = histogram(Dataset(values, "all"), 2)
    left = histogram(Dataset(values[:1000], "left"), 2)
    right = histogram(Dataset(values[1000:], "right"), 2)
    assert left.merge(right) == whole
    with pytest.raises(InvalidParameterError):
        left.merge(histogram(Dataset(values, "all"), 3))


def test_digit_histogram_is_frozen() -> None:
    h = DigitHistogram(p=2, counts=(1,) + (0,) * 9, eligible=1, max_value=10, total=1)
    with pytest.raises(AttributeError):
        h.eligible = 2  # type: ignore[misc]
