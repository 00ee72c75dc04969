"""Independent ground truth for the closed form.

``prob_oracle`` walks every second draw once with a running count, and
``simulate`` plays the two-dice experiment with a seeded generator.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterator
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any

import numpy as np

from digitlaw.core.config import get_settings
from digitlaw.core.errors import InvalidParameterError, WorkCapExceededError
from digitlaw.core.logging import operation_log_context
from digitlaw.core.summation import CompensatedSum
from digitlaw.digit_core import as_position, lower_bound, pth_digit, pth_digits
from digitlaw.exact_law import DIGITS, ModelParams, ProbabilityValue, Provenance, SeriesPoint

logger = logging.getLogger(__name__)

SEED_LIMIT = 2**64
# half-width of a Monte Carlo estimate, in standard errors
ESTIMATE_SIGMAS = 4.0


def _oracle_cap(n: int, cap: int | None) -> None:
    limit = cap if cap is not None else get_settings().oracle_cap
    if n > limit:
        raise WorkCapExceededError(
            f"oracle limited to n <= {limit}; raise DIGITLAW_ORACLE_CAP or use prob_exact",
            cap=limit,
            requested=n,
        )


def prob_oracle(params: ModelParams, *, cap: int | None = None) -> ProbabilityValue:
    """Average over the first die of the fraction of digit-d faces on the second die."""
    _oracle_cap(params.n, cap)
    base, p, d = params.base, params.p, params.d
    acc = CompensatedSum()
    acc.extend(_running_fractions(base, params.n, p, d))
    value = min(1.0, acc.value / params.support_size)
    bound = acc.error_bound() / params.support_size + math.ulp(value)
    return ProbabilityValue(value, Provenance.ORACLE, bound, params)


def _running_fractions(base: int, n: int, p: int, d: int) -> Iterator[float]:
    count = 0
    for m in range(base, n + 1):
        if pth_digit(m, p) == d:
            count += 1
        yield count / (m + 1 - base)


def oracle_series(n_max: int, p: int, *, cap: int | None = None) -> Iterator[SeriesPoint]:
    """Oracle distribution at every n = 10**(p-1) .. n_max in one pass."""
    p = as_position(p)
    base = lower_bound(p)
    if n_max < base:
        raise InvalidParameterError(f"n_max must be at least 10**(p-1) = {base}, got {n_max}")
    _oracle_cap(n_max, cap)
    return _oracle_walk(n_max, p)


def _oracle_walk(n_max: int, p: int) -> Iterator[SeriesPoint]:
    base = lower_bound(p)
    counts = [0] * 10
    sums = [CompensatedSum() for _ in DIGITS]
    for n in range(base, n_max + 1):
        counts[pth_digit(n, p)] += 1
        size = n + 1 - base
        for digit in DIGITS:
            sums[digit].add(counts[digit] / size)
        yield SeriesPoint(n, tuple(acc.value / size for acc in sums))


@dataclass(frozen=True, slots=True)
class SimulationConfig:
    """Two-dice experiment at bound n and position p; ``params.d`` is ignored."""

    params: ModelParams
    trials: int
    seed: int
    workers: int = 1

    def __post_init__(self) -> None:
        if isinstance(self.trials, bool) or not isinstance(self.trials, int) or self.trials < 1:
            raise InvalidParameterError(f"trials must be a positive integer, got {self.trials!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int):
            raise InvalidParameterError(f"seed must be an integer, got {self.seed!r}")
        if not 0 <= self.seed < SEED_LIMIT:
            raise InvalidParameterError(f"seed must fit in 64 unsigned bits, got {self.seed}")
        if self.workers < 1:
            raise InvalidParameterError(f"workers must be positive, got {self.workers}")

    @classmethod
    def build(cls, n: int, p: int, trials: int, seed: int, workers: int = 1) -> SimulationConfig:
        return cls(ModelParams(n, p, 0), trials, seed, workers)


@dataclass(frozen=True, slots=True)
class SimulationReport:
    counts: tuple[int, ...]
    frequencies: tuple[float, ...]
    std_errors: tuple[float, ...]
    trials: int
    seed: int
    params: ModelParams | None = None

    @classmethod
    def from_counts(
        cls, counts: np.ndarray, seed: int, params: ModelParams | None = None
    ) -> SimulationReport:
        trials = int(counts.sum())
        freqs = tuple(int(c) / trials for c in counts)
        errors = tuple(math.sqrt(f * (1.0 - f) / trials) for f in freqs)
        return cls(tuple(int(c) for c in counts), freqs, errors, trials, seed, params)

    def estimates(self, sigmas: float = ESTIMATE_SIGMAS) -> tuple[ProbabilityValue, ...]:
        """Observed frequencies as probabilities, bounded by ``sigmas`` standard errors."""
        if sigmas < 0:
            raise InvalidParameterError(f"sigmas must be non-negative, got {sigmas}")
        return tuple(
            ProbabilityValue(
                freq,
                Provenance.MONTE_CARLO,
                sigmas * error,
                self.params.with_digit(d) if self.params is not None else None,
            )
            for d, (freq, error) in enumerate(zip(self.frequencies, self.std_errors))
        )

    def z_scores(self, expected: tuple[float, ...]) -> tuple[float, ...]:
        """(frequency - expected) / standard error, with the error taken under ``expected``."""
        scores: list[float] = []
        for freq, prob in zip(self.frequencies, expected):
            spread = math.sqrt(prob * (1.0 - prob) / self.trials)
            if spread == 0.0:
                scores.append(0.0 if freq == prob else math.inf)
            else:
                scores.append((freq - prob) / spread)
        return tuple(scores)

    def to_dict(self) -> dict[str, Any]:
        return {
            "trials": self.trials,
            "seed": self.seed,
            "counts": list(self.counts),
            "frequencies": list(self.frequencies),
            "std_errors": list(self.std_errors),
        }


def _block_sizes(trials: int) -> list[int]:
    block = get_settings().simulation_block
    full, rest = divmod(trials, block)
    return [block] * full + ([rest] if rest else [])


def _block_generator(seed: int, block: int) -> np.random.Generator:
    # one PCG64 stream per block, so results do not depend on how blocks are shared out
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block,))))


def _draw_block(params: ModelParams, seed: int, block: int, size: int) -> tuple[np.ndarray, np.ndarray]:
    rng = _block_generator(seed, block)
    first = rng.integers(1, params.support_size + 1, size=size, dtype=np.int64)
    second = rng.integers(params.base, params.base + first, dtype=np.int64)
    return first, second


def draw_pairs(config: SimulationConfig) -> tuple[np.ndarray, np.ndarray]:
    """All (first die, second die) outcomes of a run, in block order."""
    firsts: list[np.ndarray] = []
    seconds: list[np.ndarray] = []
    for block, size in enumerate(_block_sizes(config.trials)):
        first, second = _draw_block(config.params, config.seed, block, size)
        firsts.append(first)
        seconds.append(second)
    return np.concatenate(firsts), np.concatenate(seconds)


def draw_values(config: SimulationConfig) -> np.ndarray:
    return draw_pairs(config)[1]


def simulate(config: SimulationConfig) -> SimulationReport:
    params = config.params
    sizes = _block_sizes(config.trials)

    def _tally(block: int) -> np.ndarray:
        _, second = _draw_block(params, config.seed, block, sizes[block])
        return np.bincount(pth_digits(second, params.p), minlength=10)

    with operation_log_context(
        "simulate",
        n=params.n,
        p=params.p,
        trials=config.trials,
        seed=config.seed,
        workers=config.workers,
    ) as result:
        if config.workers == 1 or len(sizes) == 1:
            partials = [_tally(block) for block in range(len(sizes))]
        else:
            with ThreadPoolExecutor(max_workers=config.workers) as pool:
                partials = list(pool.map(_tally, range(len(sizes))))
        counts = np.sum(partials, axis=0, dtype=np.int64)
        result["blocks"] = len(sizes)
        return SimulationReport.from_counts(counts, config.seed, params)
