"""Monte Carlo integration over the cube [a, b]^m.

Two sampling layouts are supported. ``joint`` draws ``n_joint`` i.i.d. points
whose coordinates come from independent per-axis streams; ``tensor`` takes the
full Cartesian product of per-axis draws, which is only affordable for small m.
Both estimate the same integral.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace
from typing import Callable, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from .data import DomainBounds
from .errors import ConfigError, TensorGridTooLargeError

DEFAULT_AXIS_POINTS = 1000
DEFAULT_JOINT_POINTS_LOW = 100_000
DEFAULT_JOINT_POINTS_HIGH = 1_000_000
CHUNK_ROWS = 1 << 17
MODES = ("joint", "tensor")

_SEED_MASK = (1 << 64) - 1


def default_joint_points(dim: int) -> int:
    return DEFAULT_JOINT_POINTS_LOW if dim <= 2 else DEFAULT_JOINT_POINTS_HIGH


def thread_cap() -> int:
    """Worker cap from CAUSAL_MOMENTS_THREADS (defaults to the CPU count)."""
    raw = os.environ.get("CAUSAL_MOMENTS_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ConfigError(f"CAUSAL_MOMENTS_THREADS must be an integer, got {raw!r}") from None
    return os.cpu_count() or 1


def rng_stream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for ``(seed, *key)``; distinct keys never share a stream."""
    if seed < 0:
        raise ConfigError(f"seed must be non-negative, got {seed}")
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed) & _SEED_MASK,
                                                        spawn_key=tuple(int(k) for k in key)))


def derive_seed(seed: int, *key: int) -> int:
    """64-bit child seed, used to hand each replicate its own Monte Carlo seed."""
    if seed < 0:
        raise ConfigError(f"seed must be non-negative, got {seed}")
    ss = np.random.SeedSequence(entropy=int(seed) & _SEED_MASK, spawn_key=tuple(int(k) for k in key))
    lo, hi = ss.generate_state(2, dtype=np.uint32)
    return (int(hi) << 32) | int(lo)


# stream keys are namespaced so axis draws never collide with other consumers
_AXIS_STREAM = 0


def draw_axis_points(bounds: DomainBounds, count: int, seed: int, axis_index: int) -> np.ndarray:
    """``count`` i.i.d. uniform draws on [a, b] for one integration axis."""
    if count < 1:
        raise ConfigError(f"point count must be >= 1, got {count}")
    if bounds.a > bounds.b:
        raise ConfigError(f"invalid bounds [{bounds.a}, {bounds.b}]")
    if bounds.a == bounds.b:
        return np.full(count, bounds.a)
    u = rng_stream(seed, _AXIS_STREAM, axis_index).random(count)
    return bounds.a + (bounds.b - bounds.a) * u


@dataclass(frozen=True)
class IntegrationConfig:
    """How an integral over [a, b]^m is sampled.

    ``dimension`` and ``bounds`` may be left as None, in which case the
    estimator supplies them (the moment order and the data-derived domain).
    ``points_per_axis`` is either one count applied to every axis or one per axis.
    """

    dimension: Optional[int] = None
    mode: str = "joint"
    n_joint: Optional[int] = None
    points_per_axis: Union[int, Tuple[int, ...], None] = None
    seed: int = 0
    bounds: Optional[DomainBounds] = None
    allow_large_tensor: bool = False
    workers: int = 1

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.dimension is not None and self.dimension < 1:
            raise ConfigError(f"dimension must be >= 1, got {self.dimension}")
        if self.n_joint is not None and self.n_joint < 1:
            raise ConfigError(f"n_joint must be >= 1, got {self.n_joint}")
        if self.points_per_axis is not None:
            counts = self.points_per_axis
            if isinstance(counts, (list, tuple)):
                object.__setattr__(self, "points_per_axis", tuple(int(c) for c in counts))
                counts = self.points_per_axis
                if self.dimension is not None and len(counts) != self.dimension:
                    raise ConfigError(f"{len(counts)} axis counts given for dimension {self.dimension}")
            else:
                counts = (int(counts),)
            if any(c < 1 for c in counts):
                raise ConfigError(f"axis point counts must be >= 1, got {self.points_per_axis}")
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")

    def with_seed(self, seed: int) -> "IntegrationConfig":
        return replace(self, seed=seed)

    def joint_points(self, dim: int) -> int:
        return self.n_joint if self.n_joint is not None else default_joint_points(dim)

    def axis_counts(self, dim: int) -> Tuple[int, ...]:
        counts = self.points_per_axis
        if counts is None:
            return (DEFAULT_AXIS_POINTS,) * dim
        if isinstance(counts, tuple):
            if len(counts) != dim:
                raise ConfigError(f"{len(counts)} axis counts given for dimension {dim}")
            return counts
        return (int(counts),) * dim

    def to_dict(self) -> dict:
        out = asdict(self)
        out["bounds"] = None if self.bounds is None else self.bounds.as_list()
        if isinstance(self.points_per_axis, tuple):
            out["points_per_axis"] = list(self.points_per_axis)
        return out


class Integrand:
    """Vectorised integrand on [a, b]^dim.

    ``fn`` maps an ``(n, dim)`` array of points to ``(n,)`` values, or to
    ``(n, width)`` when several integrals share the same sample points.
    Integrands form a vector space under ``+``, ``-`` and scalar ``*``.
    """

    __slots__ = ("dim", "fn", "width", "value_range")

    def __init__(self, dim: int, fn: Callable[[np.ndarray], np.ndarray], width: int = 1,
                 value_range: Tuple[float, float] = (-math.inf, math.inf)):
        if dim < 1:
            raise ConfigError(f"integrand dimension must be >= 1, got {dim}")
        self.dim = int(dim)
        self.fn = fn
        self.width = int(width)
        self.value_range = value_range

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return self.fn(points)

    def _check(self, other: "Integrand"):
        if other.dim != self.dim or other.width != self.width:
            raise ConfigError("cannot combine integrands of different shape")

    def __add__(self, other):
        self._check(other)
        return Integrand(self.dim, lambda p: self.fn(p) + other.fn(p), self.width)

    def __sub__(self, other):
        self._check(other)
        return Integrand(self.dim, lambda p: self.fn(p) - other.fn(p), self.width)

    def __mul__(self, scalar):
        scalar = float(scalar)
        return Integrand(self.dim, lambda p: scalar * self.fn(p), self.width)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0


class McResult(NamedTuple):
    """Monte Carlo estimate, its standard error and the number of evaluations."""

    value: Union[float, np.ndarray]
    stderr: Union[float, np.ndarray]
    n_points: int


def _grid_chunk(axes: Sequence[np.ndarray], start: int, stop: int) -> np.ndarray:
    shape = tuple(len(a) for a in axes)
    idx = np.unravel_index(np.arange(start, stop, dtype=np.int64), shape)
    return np.column_stack([axis[i] for axis, i in zip(axes, idx)])


def joint_points(bounds: DomainBounds, n: int, dim: int, seed: int) -> np.ndarray:
    """The ``(n, dim)`` joint-mode sample; smaller n or dim give a leading sub-block."""
    return np.column_stack([draw_axis_points(bounds, n, seed, p) for p in range(dim)])


def _sample_layout(dim: int, config: IntegrationConfig, bounds: DomainBounds):
    """Return (total point count, chunk producer)."""
    if config.mode == "joint":
        n = config.joint_points(dim)
        points = joint_points(bounds, n, dim, config.seed)
        return n, lambda s, e: points[s:e]
    if dim >= 3 and not config.allow_large_tensor:
        counts = config.axis_counts(dim)
        raise TensorGridTooLargeError(
            f"tensor grid for dimension {dim} needs {math.prod(counts):,} evaluations; "
            "use joint mode or set allow_large_tensor=True")
    counts = config.axis_counts(dim)
    axes = [draw_axis_points(bounds, c, config.seed, p) for p, c in enumerate(counts)]
    return math.prod(counts), lambda s, e: _grid_chunk(axes, s, e)


def evaluate_on_samples(integrand: Integrand, config: IntegrationConfig,
                        bounds: DomainBounds) -> np.ndarray:
    """Integrand values at every sample point, shape ``(n, width)``."""
    total, chunk = _sample_layout(integrand.dim, config, bounds)
    starts = list(range(0, total, CHUNK_ROWS))

    def run(s):
        vals = np.asarray(integrand(chunk(s, min(s + CHUNK_ROWS, total))), dtype=np.float64)
        return vals.reshape(vals.shape[0], -1)

    workers = min(config.workers, thread_cap(), len(starts))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, starts))
    else:
        parts = [run(s) for s in starts]
    return np.concatenate(parts, axis=0)


def integrate_with_error(integrand: Integrand, config: IntegrationConfig,
                         bounds: Optional[DomainBounds] = None) -> McResult:
    """Integral estimate plus a standard error from the sample spread.

    Sums use ``math.fsum`` (exactly rounded), so the result does not depend
    on chunking or worker count. For tensor grids the standard error treats
    grid values as independent, which is only approximate.
    """
    if config.dimension is not None and config.dimension != integrand.dim:
        raise ConfigError(f"integrand has dimension {integrand.dim}, config expects {config.dimension}")
    bounds = bounds if bounds is not None else config.bounds
    if bounds is None:
        raise ConfigError("integration bounds are required")
    zero = 0.0 if integrand.width == 1 else np.zeros(integrand.width)
    if bounds.a == bounds.b:
        return McResult(zero, zero, 0)
    values = evaluate_on_samples(integrand, config, bounds)
    return summarize_samples(values, bounds.width ** integrand.dim, integrand.width)


def summarize_samples(values: np.ndarray, volume: float, width: int = 1) -> McResult:
    """Scale per-point values ``(n, width)`` into an integral estimate with standard error."""
    n = values.shape[0]
    means = np.array([math.fsum(values[:, c].tolist()) / n for c in range(values.shape[1])])
    if n > 1:
        spread = values.std(axis=0, ddof=1) / math.sqrt(n)
    else:
        spread = np.zeros(values.shape[1])
    est, se = volume * means, volume * spread
    if width == 1:
        return McResult(float(est[0]), float(se[0]), n)
    return McResult(est, se, n)


def integrate(integrand: Integrand, config: IntegrationConfig,
              bounds: Optional[DomainBounds] = None):
    """Monte Carlo estimate of the integral of ``integrand`` over [a, b]^m."""
    return integrate_with_error(integrand, config, bounds).value
