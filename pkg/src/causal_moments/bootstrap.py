"""Nonparametric percentile bootstrap around any table -> estimate function."""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np

from .data import ObservationTable
from .errors import BootstrapFailure, CausalMomentsError, ConfigError, QualityWarning
from .quadrature import derive_seed, rng_stream, thread_cap

RESAMPLE_MODES = ("pooled", "within-arm")
FAILURE_WARN_FRACTION = 0.2

_RESAMPLE_STREAM = 3
_MC_SEED_STREAM = 4

# estimator(table, mc_seed) -> one value or a fixed-length vector of values
Estimator = Callable[[ObservationTable, int], Union[float, Sequence[float]]]


@dataclass(frozen=True)
class BootstrapConfig:
    replicates: int = 1000
    level: float = 0.95
    seed: int = 0
    resample_mode: str = "pooled"
    workers: int = 1

    def __post_init__(self):
        if isinstance(self.replicates, bool) or int(self.replicates) != self.replicates or self.replicates < 2:
            raise ConfigError(f"bootstrap needs at least 2 replicates, got {self.replicates!r}")
        if not 0.0 < self.level < 1.0:
            raise ConfigError(f"level must lie in (0, 1), got {self.level}")
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")
        if self.resample_mode not in RESAMPLE_MODES:
            raise ConfigError(f"resample_mode must be one of {RESAMPLE_MODES}, got {self.resample_mode!r}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class BootstrapResult:
    """Replicate mean and percentile interval; unpacks as (mean, lower, upper, replicate_values)."""

    mean: float
    lower: float
    upper: float
    replicate_values: Tuple[float, ...]
    failures: int = 0
    level: float = 0.95

    def __iter__(self):
        return iter((self.mean, self.lower, self.upper, self.replicate_values))


def resample_rows(table: ObservationTable, rng: np.random.Generator, mode: str) -> np.ndarray:
    """Row indices of one bootstrap sample, drawn with replacement."""
    n = len(table)
    if mode == "pooled":
        return rng.integers(0, n, size=n)
    parts = []
    for arm in sorted(table.arms):
        rows = np.flatnonzero(table.x == arm)
        parts.append(rows[rng.integers(0, rows.size, size=rows.size)])
    return np.sort(np.concatenate(parts))


def nearest_rank(sorted_values: np.ndarray, prob: float) -> float:
    """Order statistic of rank ceil(prob * n), clamped to [1, n]."""
    n = sorted_values.shape[0]
    # tolerance keeps e.g. 0.025 * 1000 at rank 25 despite rounding
    rank = min(max(math.ceil(prob * n - 1e-9), 1), n)
    return sorted_values[rank - 1]


def percentile_interval(values: np.ndarray, level: float):
    """Nearest-rank percentile interval of each column of ``values``."""
    ordered = np.sort(np.asarray(values, dtype=float), axis=0)
    alpha = 1.0 - level
    return nearest_rank(ordered, alpha / 2), nearest_rank(ordered, 1 - alpha / 2)


def bootstrap_replicates(estimator: Estimator, table: ObservationTable, config: BootstrapConfig,
                         on_replicate: Optional[Callable[[int, ObservationTable], None]] = None):
    """Run the estimator on every replicate.

    Returns ``(values, failures)`` where ``values`` has one row per successful
    replicate in replicate order. A replicate fails when the estimator raises
    a package error (for instance an arm missing from a pooled resample).
    """

    def run(b: int):
        rows = resample_rows(table, rng_stream(config.seed, _RESAMPLE_STREAM, b), config.resample_mode)
        sample = table.take(rows)
        if on_replicate is not None:
            on_replicate(b, sample)
        try:
            return np.atleast_1d(np.asarray(estimator(sample, derive_seed(config.seed, _MC_SEED_STREAM, b)),
                                            dtype=float))
        except CausalMomentsError:
            return None

    workers = min(config.workers, thread_cap())
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, range(config.replicates)))
    else:
        results = [run(b) for b in range(config.replicates)]
    ok = [r for r in results if r is not None]
    failures = len(results) - len(ok)
    if not ok:
        raise BootstrapFailure(f"all {config.replicates} bootstrap replicates failed")
    if failures > FAILURE_WARN_FRACTION * config.replicates:
        warnings.warn(f"{failures} of {config.replicates} bootstrap replicates failed", QualityWarning,
                      stacklevel=2)
    return np.vstack(ok), failures


def bootstrap_ci(estimator: Estimator, table: ObservationTable,
                 config: Optional[BootstrapConfig] = None, **kwargs) -> BootstrapResult:
    """Percentile bootstrap interval for a scalar estimator."""
    config = config or BootstrapConfig()
    values, failures = bootstrap_replicates(estimator, table, config, **kwargs)
    if values.shape[1] != 1:
        raise ConfigError("bootstrap_ci needs a scalar estimator; use bootstrap_replicates for vectors")
    column = values[:, 0]
    lower, upper = percentile_interval(column, config.level)
    return BootstrapResult(math.fsum(column.tolist()) / column.size, float(lower), float(upper),
                           tuple(column.tolist()), failures, config.level)
