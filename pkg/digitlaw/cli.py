"""Command-line surface: ``digitlaw {prob,scan,limits,simulate,audit}``.

Data goes to stdout (or ``scan --out``), diagnostics and logs to stderr.
Exit codes: 0 success, 1 computation error, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Any, TextIO

import numpy as np

from digitlaw.asymptotics import limit_table
from digitlaw.audit import LAWS, fit, histogram, ingest
from digitlaw.core.config import get_settings
from digitlaw.core.errors import ColumnNotFoundError, DigitLawError, InvalidParameterError
from digitlaw.core.logging import configure_logging
from digitlaw.exact_law import (
    DIGITS,
    ModelParams,
    distribution,
    prob_exact,
    prob_scan,
    prob_via_recursion,
)
from digitlaw.oracle import SimulationConfig, prob_oracle, simulate
from digitlaw.reference import load_tables

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

FORMATS = ("table", "csv", "json-lines")
SERIES_COLUMNS = ("n",) + tuple(f"P_{d}" for d in DIGITS)
LIMIT_KINDS = ("alpha", "alpha-sub", "central", "hill", "all")
# slack for binary noise when comparing against rounded printed values
_TOLERANCE_SLACK = 1e-12


@dataclass(slots=True)
class OutputRecord:
    format: str
    columns: list[str]
    rows: Iterable[dict[str, Any]]


def format_value(value: Any, precision: int) -> str:
    """Text form of one cell: floats with ``precision`` significant digits, None as empty."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        if value == 0.0:
            value = 0.0
        return format(value, f".{precision}g")
    return str(value)


def _json_literal(value: Any, precision: int) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        text = format_value(value, precision)
        return text if math.isfinite(float(value)) else json.dumps(text)
    return json.dumps(str(value), ensure_ascii=False)


def _json_lines(record: OutputRecord, precision: int) -> Iterator[str]:
    for row in record.rows:
        body = ", ".join(
            f"{json.dumps(column)}: {_json_literal(row.get(column), precision)}"
            for column in record.columns
        )
        yield "{" + body + "}\n"


def _table_lines(record: OutputRecord, precision: int) -> Iterator[str]:
    cells = [[format_value(row.get(c), precision) for c in record.columns] for row in record.rows]
    widths = [
        max([len(column)] + [len(line[index]) for line in cells])
        for index, column in enumerate(record.columns)
    ]
    yield "  ".join(c.rjust(w) for c, w in zip(record.columns, widths)).rstrip() + "\n"
    yield "  ".join("-" * w for w in widths) + "\n"
    for line in cells:
        yield "  ".join(c.rjust(w) for c, w in zip(line, widths)).rstrip() + "\n"


def emit(record: OutputRecord, stream: TextIO, precision: int) -> None:
    if record.format == "json-lines":
        stream.writelines(_json_lines(record, precision))
    elif record.format == "csv":
        writer = csv.writer(stream, delimiter=",", lineterminator="\n")
        writer.writerow(record.columns)
        for row in record.rows:
            writer.writerow([format_value(row.get(c), precision) for c in record.columns])
    else:
        stream.writelines(_table_lines(record, precision))


def _parse_decimate(text: str) -> str | int | list[int] | None:
    value = text.strip().lower()
    if value == "auto":
        return None
    if value in ("none", "all"):
        return "none"
    try:
        if "," in value:
            return [int(part) for part in value.split(",") if part.strip()]
        return int(value)
    except ValueError as exc:
        raise InvalidParameterError(
            f"--decimate takes auto, none, a step or a comma-separated list, got {text!r}"
        ) from exc


def _cmd_prob(args: argparse.Namespace, precision: int) -> int:
    params = ModelParams(args.n, args.p, args.d)
    if args.method == "recursion":
        result = prob_via_recursion(params)
    elif args.method == "oracle":
        result = prob_oracle(params)
    else:
        result = prob_exact(params, exact=args.rational)
    row = result.to_dict()
    columns = ["n", "p", "d", "value", "provenance", "abs_error_bound"]
    if "exact" in row:
        columns.append("exact")
    emit(OutputRecord(args.format, columns, [row]), sys.stdout, precision)
    return EXIT_OK


def _cmd_scan(args: argparse.Namespace, precision: int) -> int:
    points = prob_scan(args.n_max, args.p, decimate=_parse_decimate(args.decimate))
    columns = list(SERIES_COLUMNS) + (["log10_n"] if args.logx else [])
    record = OutputRecord(args.format, columns, (pt.to_dict(logx=args.logx) for pt in points))
    if args.out is None:
        emit(record, sys.stdout, precision)
    else:
        with Path(args.out).open("w", encoding="utf-8", newline="") as handle:
            emit(record, handle, precision)
        logger.info("scan.written", extra={"event": {"path": str(args.out)}})
    return EXIT_OK


def _limit_rows(kind: str, p: int, window: int | None) -> tuple[list[dict[str, Any]], int]:
    tables = load_tables()
    if kind == "alpha-sub" and window is None:
        pinned = tables.find(kind, p)
        if pinned is None:
            raise InvalidParameterError(f"alpha-sub for p = {p} needs a window index -i")
        window = pinned.window
    targets = tables.find(kind, p, window)

    rows: list[dict[str, Any]] = []
    misses = 0
    for line in limit_table(kind, p, i=window):
        for quantity, value in line.columns.items():
            target = targets.target(line.d, quantity) if targets is not None else None
            printed = targets.printed(line.d, quantity) if targets is not None else None
            diff = value - target if target is not None else None
            if diff is not None and targets is not None:
                if abs(diff) > targets.tolerance + _TOLERANCE_SLACK:
                    misses += 1
            rows.append(
                {
                    "table": kind,
                    "i": window if kind == "alpha-sub" else None,
                    "d": line.d,
                    "quantity": quantity,
                    "value": value,
                    "target": target,
                    "printed": printed,
                    "diff": diff,
                }
            )
    return rows, misses


def _cmd_limits(args: argparse.Namespace, precision: int) -> int:
    if args.kind == "all":
        kinds = ["alpha", "central"]
        if args.i is not None or load_tables().find("alpha-sub", args.p) is not None:
            kinds.insert(1, "alpha-sub")
    else:
        kinds = [args.kind]

    rows: list[dict[str, Any]] = []
    misses = 0
    for kind in kinds:
        kind_rows, kind_misses = _limit_rows(kind, args.p, args.i)
        rows.extend(kind_rows)
        misses += kind_misses

    columns = ["table", "i", "d", "quantity", "value", "target", "printed", "diff"]
    emit(OutputRecord(args.format, columns, rows), sys.stdout, precision)
    if args.check and misses:
        print(f"digitlaw: {misses} value(s) outside the printed tolerance", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


def _cmd_simulate(args: argparse.Namespace, precision: int) -> int:
    config = SimulationConfig.build(args.n, args.p, args.trials, args.seed, args.workers)
    report = simulate(config)
    expected = tuple(value.value for value in distribution(args.n, args.p))
    scores = report.z_scores(expected)
    estimates = report.estimates()
    rows = [
        {
            "d": d,
            "count": report.counts[d],
            "frequency": estimates[d].value,
            "std_error": report.std_errors[d],
            "exact": expected[d],
            "z": scores[d],
        }
        for d in DIGITS
    ]
    columns = ["d", "count", "frequency", "std_error", "exact", "z"]
    emit(OutputRecord(args.format, columns, rows), sys.stdout, precision)
    return EXIT_OK


def _cmd_audit(args: argparse.Namespace, precision: int) -> int:
    laws = [law.strip() for law in args.laws.split(",") if law.strip()]
    dataset = ingest(args.input, args.column, header=not args.no_header, delimiter=args.delimiter)
    if dataset.skipped:
        print(
            f"digitlaw: skipped {dataset.skipped} record(s) that are not positive integers",
            file=sys.stderr,
        )
    report = fit(histogram(dataset, args.p), laws, n=args.n_bound)
    for note in report.notes:
        print(f"digitlaw: {note}", file=sys.stderr)
    columns = ["law", "chi_square", "mad"] + [f"expected_{d}" for d in DIGITS]
    emit(OutputRecord(args.format, columns, report.to_records()), sys.stdout, precision)
    return EXIT_OK


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from exc
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="digitlaw",
        description="p-th significant digit probabilities under the two-stage uniform model",
    )
    parser.add_argument("--format", choices=FORMATS, default="table", help="Output format")
    parser.add_argument(
        "--precision", type=_positive_int, default=None, help="Significant digits (default: 6)"
    )
    parser.add_argument("--log-level", default=None, help="Log level for stderr (default: WARNING)")
    sub = parser.add_subparsers(dest="command", required=True)

    prob = sub.add_parser("prob", help="P(p-th digit = d) at bound n")
    prob.add_argument("-n", type=int, required=True, help="Upper bound n")
    prob.add_argument("-p", type=int, required=True, help="Digit position (>= 2)")
    prob.add_argument("-d", type=int, required=True, help="Digit value 0..9")
    prob.add_argument("--method", choices=["exact", "recursion", "oracle"], default="exact")
    prob.add_argument(
        "--rational", action="store_true", help="Exact rational arithmetic (small n only)"
    )
    prob.set_defaults(handler=_cmd_prob)

    scan = sub.add_parser("scan", help="Series of all ten probabilities up to n-max")
    scan.add_argument("-p", type=int, required=True)
    scan.add_argument("--n-max", type=int, required=True)
    scan.add_argument(
        "--decimate",
        default="auto",
        help="auto (dense then log-spaced), none, a step, or a comma-separated list of n",
    )
    scan.add_argument("--logx", action="store_true", help="Add a log10(n) column")
    scan.add_argument("--out", type=Path, default=None, help="Write to a UTF-8 file")
    scan.set_defaults(handler=_cmd_scan)

    limits = sub.add_parser("limits", help="Limit tables next to the printed values")
    limits.add_argument("-p", type=int, required=True)
    limits.add_argument("--kind", choices=LIMIT_KINDS, default="all")
    limits.add_argument("-i", type=int, default=None, help="Window index for alpha-sub")
    limits.add_argument(
        "--check", action="store_true", help="Exit 1 when a value misses its printed target"
    )
    limits.set_defaults(handler=_cmd_limits)

    simulate_cmd = sub.add_parser("simulate", help="Seeded Monte Carlo run of the two-dice draw")
    simulate_cmd.add_argument("-n", type=int, required=True)
    simulate_cmd.add_argument("-p", type=int, required=True)
    simulate_cmd.add_argument("--trials", type=_positive_int, default=100_000)
    simulate_cmd.add_argument("--seed", type=int, default=0)
    simulate_cmd.add_argument("--workers", type=_positive_int, default=1)
    simulate_cmd.set_defaults(handler=_cmd_simulate)

    audit_cmd = sub.add_parser("audit", help="Fit a data column against the digit laws")
    audit_cmd.add_argument("input", type=Path)
    audit_cmd.add_argument("--column", default="0", help="Column name or zero-based index")
    audit_cmd.add_argument("-p", type=int, default=2)
    audit_cmd.add_argument("--n-bound", type=int, default=None, help="Model bound n")
    audit_cmd.add_argument("--laws", default=",".join(LAWS))
    audit_cmd.add_argument("--no-header", action="store_true")
    audit_cmd.add_argument("--delimiter", default=None)
    audit_cmd.set_defaults(handler=_cmd_audit)
    return parser


def parse_args(argv: Sequence[str] | None = None) -> argparse.Namespace:
    return build_parser().parse_args(argv)


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE

    settings = get_settings()
    configure_logging(level=args.log_level or settings.log_level, fmt=settings.log_format)
    precision = args.precision if args.precision is not None else settings.precision

    try:
        return args.handler(args, precision)
    except (InvalidParameterError, ColumnNotFoundError) as exc:
        print(f"digitlaw: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DigitLawError as exc:
        print(f"digitlaw: error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except OSError as exc:
        print(f"digitlaw: error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
