"""Exact and asymptotic p-th significant digit probabilities under the two-stage uniform model."""

from digitlaw.asymptotics import (
    LimitKind,
    LimitValue,
    LogSumConstants,
    alpha,
    alpha_sub,
    benford_first_digit,
    central_value,
    hill_prob,
    limit_table,
    logsum_constants,
)
from digitlaw.audit import DigitHistogram, FitReport, LawFit, fit, histogram, ingest
from digitlaw.digit_core import (
    CountBreakdown,
    count_pth_digit_upto,
    count_pth_digit_upto_oracle,
    num_digits,
    pth_digit,
    pth_digits,
)
from digitlaw.exact_law import (
    ModelParams,
    ProbabilityValue,
    Provenance,
    SeriesPoint,
    TailIndices,
    distribution,
    level_sums,
    phi_index,
    prob_exact,
    prob_scan,
    prob_via_recursion,
    psi_index,
    r_term,
    tail_indices,
)
from digitlaw.oracle import (
    SimulationConfig,
    SimulationReport,
    oracle_series,
    prob_oracle,
    simulate,
)

__version__ = "0.1.0"

__all__ = [
    "CountBreakdown",
    "DigitHistogram",
    "FitReport",
    "LawFit",
    "LimitKind",
    "LimitValue",
    "LogSumConstants",
    "ModelParams",
    "ProbabilityValue",
    "Provenance",
    "SeriesPoint",
    "SimulationConfig",
    "SimulationReport",
    "TailIndices",
    "alpha",
    "alpha_sub",
    "benford_first_digit",
    "central_value",
    "count_pth_digit_upto",
    "count_pth_digit_upto_oracle",
    "distribution",
    "fit",
    "hill_prob",
    "histogram",
    "ingest",
    "level_sums",
    "limit_table",
    "logsum_constants",
    "num_digits",
    "oracle_series",
    "phi_index",
    "prob_exact",
    "prob_oracle",
    "prob_scan",
    "prob_via_recursion",
    "psi_index",
    "pth_digit",
    "pth_digits",
    "r_term",
    "simulate",
    "tail_indices",
]
