"""Structural causal model simulators and exact finite-support oracles.

Two independent routes to the same population quantities live here:

* enumeration: E[(f(i,u) - f(j,u))^m] summed over the noise support, and
* the plug-in integrals from :mod:`causal_moments.integrands` evaluated with the
  exact population CDFs, integrated cell by cell.

Population CDFs of a finite-support SCM are step functions, so every
integrand is constant on the cells between consecutive outcome values and a
midpoint rule over those cells is exact up to rounding.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .data import ObservationTable
from .errors import ValidationError
from .identify import ArmPair
from .integrands import (moment_bounds_integrand, moment_integrand, product_bounds_integrand,
                         product_integrand)
from .quadrature import Integrand, rng_stream

Response = Callable[[np.ndarray, np.ndarray], np.ndarray]

_ARM_STREAM = 1
_NOISE_STREAM = 2


@dataclass(frozen=True)
class UniformNoise:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValidationError(f"uniform noise needs lo < hi, got ({self.lo}, {self.hi})")

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.uniform(self.lo, self.hi, n)

    def describe(self) -> dict:
        return {"law": "uniform", "lo": self.lo, "hi": self.hi}


@dataclass(frozen=True)
class FiniteNoise:
    values: Tuple[float, ...]
    probs: Tuple[float, ...]

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        probs = tuple(float(p) for p in self.probs)
        if not values or len(values) != len(probs):
            raise ValidationError("finite noise needs matching, nonempty values and probabilities")
        if len(set(values)) != len(values):
            raise ValidationError("finite noise support values must be distinct")
        if any(p < 0 for p in probs) or abs(math.fsum(probs) - 1.0) > 1e-12:
            raise ValidationError(f"noise probabilities must be >= 0 and sum to 1, got {probs}")
        order = np.argsort(values)
        object.__setattr__(self, "values", tuple(values[k] for k in order))
        object.__setattr__(self, "probs", tuple(probs[k] for k in order))

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return np.asarray(self.values)[rng.choice(len(self.values), size=n, p=self.probs)]

    def describe(self) -> dict:
        return {"law": "finite", "values": list(self.values), "probs": list(self.probs)}


Noise = Union[UniformNoise, FiniteNoise]


def _check_arm_probabilities(probs: Mapping[int, float]) -> Dict[int, float]:
    out = {int(k): float(v) for k, v in probs.items()}
    if not out:
        raise ValidationError("at least one arm is required")
    if any(p < 0 for p in out.values()) or abs(math.fsum(out.values()) - 1.0) > 1e-12:
        raise ValidationError(f"arm probabilities must be >= 0 and sum to 1, got {out}")
    return out


@dataclass(frozen=True, eq=False)
class ScmSpec:
    """Y := response(X, U) with X ~ arm_probabilities and U ~ noise, X independent of U."""

    name: str
    arm_probabilities: Mapping[int, float]
    noise: Noise
    response: Response

    def __post_init__(self):
        object.__setattr__(self, "arm_probabilities", _check_arm_probabilities(self.arm_probabilities))

    @property
    def arms(self) -> List[int]:
        return sorted(self.arm_probabilities)

    def describe(self) -> dict:
        return {"name": self.name, "arm_probabilities": {str(k): v for k, v in sorted(self.arm_probabilities.items())},
                "noise": self.noise.describe()}


@dataclass(frozen=True, eq=False)
class DiscreteScm:
    """Finite-support SCM stored as a table of potential outcomes.

    ``outcomes[arm][k]`` is f(arm, support[k]); ``probs[k]`` is P(U = support[k]).
    """

    name: str
    arm_probabilities: Mapping[int, float]
    support: np.ndarray
    probs: np.ndarray
    outcomes: Mapping[int, np.ndarray]

    def __post_init__(self):
        probs_map = _check_arm_probabilities(self.arm_probabilities)
        noise = FiniteNoise(tuple(self.support), tuple(self.probs))
        order = np.argsort(np.asarray(self.support, dtype=float))
        outcomes = {}
        for arm in probs_map:
            if arm not in self.outcomes:
                raise ValidationError(f"no potential outcomes for arm {arm}")
            vals = np.asarray(self.outcomes[arm], dtype=float)
            if vals.shape != (len(noise.values),):
                raise ValidationError(f"arm {arm}: expected {len(noise.values)} outcomes, got {vals.shape}")
            if not np.isfinite(vals).all():
                raise ValidationError(f"arm {arm}: outcomes must be finite")
            outcomes[arm] = vals[order]
        object.__setattr__(self, "arm_probabilities", probs_map)
        object.__setattr__(self, "support", np.asarray(noise.values))
        object.__setattr__(self, "probs", np.asarray(noise.probs))
        object.__setattr__(self, "outcomes", outcomes)

    @classmethod
    def from_spec(cls, spec: ScmSpec) -> "DiscreteScm":
        if not isinstance(spec.noise, FiniteNoise):
            raise ValidationError(f"{spec.name}: a discrete SCM needs finite-support noise")
        u = np.asarray(spec.noise.values)
        outcomes = {arm: np.asarray(spec.response(np.full(u.size, arm), u), dtype=float) for arm in spec.arms}
        return cls(spec.name, spec.arm_probabilities, u, np.asarray(spec.noise.probs), outcomes)

    @property
    def arms(self) -> List[int]:
        return sorted(self.arm_probabilities)

    def as_spec(self) -> ScmSpec:
        support = self.support
        table = self.outcomes

        def response(x, u):
            idx = np.searchsorted(support, u)
            out = np.empty(len(u))
            for arm, vals in table.items():
                mask = x == arm
                out[mask] = vals[idx[mask]]
            return out

        return ScmSpec(self.name, self.arm_probabilities, FiniteNoise(tuple(support), tuple(self.probs)), response)

    def is_monotone(self) -> bool:
        """True when every arm's response is nondecreasing in u, or every one is nonincreasing."""
        diffs = [np.diff(v) for v in self.outcomes.values()]
        return all((d >= 0).all() for d in diffs) or all((d <= 0).all() for d in diffs)

    def arm_mean(self, arm: int) -> float:
        return math.fsum(self.probs * self.outcomes[arm])

    def population_cdf(self, arm: int, centered: bool = False) -> "PopulationCdf":
        return PopulationCdf.from_atoms(self.outcomes[arm], self.probs,
                                        center=self.arm_mean(arm) if centered else 0.0)


@dataclass(frozen=True, eq=False)
class PopulationCdf:
    """Exact y -> P(Y < y) (of Y - center when centered) for a finite distribution."""

    values: np.ndarray
    cumulative: np.ndarray
    center: float = 0.0

    @classmethod
    def from_atoms(cls, values, probs, center: float = 0.0) -> "PopulationCdf":
        values = np.asarray(values, dtype=float)
        probs = np.asarray(probs, dtype=float)
        atoms, inverse = np.unique(values, return_inverse=True)
        mass = np.zeros(atoms.size)
        np.add.at(mass, inverse, probs)
        cumulative = np.concatenate([[0.0], np.cumsum(mass)])
        cumulative[-1] = 1.0
        return cls(atoms, cumulative, float(center))

    def __call__(self, y):
        y = np.asarray(y, dtype=float) + self.center
        return self.cumulative[np.searchsorted(self.values, y, side="left")]


# -- presets ---------------------------------------------------------------------------

def _scm_a(x, u):
    return -(x + 1) * u * (x * u >= 0)


def _scm_b(x, u):
    return x ** 2 * u


def _example_1(x, u):
    return x + u


def _example_2(x, u):
    return x * (u + 1) + 1


def _example_3(x, u):
    return x ** 2 * (u + 1) + 1


_THIRDS = {-1: 1 / 3, 0: 1 / 3, 1: 1 / 3}
# Example 1 only fixes E[U] = 0; a narrow noise keeps sampling error in the
# high-order raw moments below the homogeneous-effect tolerance at N = 2000.
EXAMPLE_1_NOISE_HALF_WIDTH = 0.05

PRESETS: Dict[str, Callable[[], ScmSpec]] = {
    "scm-a": lambda: ScmSpec("scm-a", {0: 0.2, 1: 0.8}, UniformNoise(-1.0, 1.0), _scm_a),
    "scm-b": lambda: ScmSpec("scm-b", dict(_THIRDS), UniformNoise(0.0, 1.0), _scm_b),
    "example-1": lambda: ScmSpec("example-1", dict(_THIRDS),
                                 UniformNoise(-EXAMPLE_1_NOISE_HALF_WIDTH, EXAMPLE_1_NOISE_HALF_WIDTH), _example_1),
    "example-2": lambda: ScmSpec("example-2", dict(_THIRDS), UniformNoise(-1.0, 1.0), _example_2),
    "example-3": lambda: ScmSpec("example-3", dict(_THIRDS), UniformNoise(-1.0, 1.0), _example_3),
}

# population values of the presets: ICE of scm-a is -|U| with U ~ Unif(-1, 1)
GROUND_TRUTH = {
    "scm-a": {"moment_2": 1 / 3, "moment_3": -1 / 4, "moment_4": 1 / 5, "ate": -1 / 2,
              "central_moment_2": 1 / 12},
    "scm-b": {"product_1,0;0,-1": -1 / 3},
}


def preset(name: str) -> ScmSpec:
    try:
        return PRESETS[name]()
    except KeyError:
        raise ValidationError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


def discretized_example(name: str, support: Sequence[float] = (-0.5, 0.0, 0.5)) -> DiscreteScm:
    """Preset response with uniform noise replaced by a uniform law on ``support``."""
    spec = preset(name)
    k = len(support)
    finite = ScmSpec(f"{name}-discrete", spec.arm_probabilities, FiniteNoise(tuple(support), (1 / k,) * k),
                     spec.response)
    return DiscreteScm.from_spec(finite)


# -- simulation ------------------------------------------------------------------------

def simulate(spec: Union[ScmSpec, DiscreteScm], n: int, seed: int) -> ObservationTable:
    """Draw ``n`` i.i.d. rows (X, Y) from the SCM."""
    if n < 1:
        raise ValidationError(f"sample size must be >= 1, got {n}")
    if isinstance(spec, DiscreteScm):
        spec = spec.as_spec()
    arms = np.array(spec.arms)
    probs = np.array([spec.arm_probabilities[a] for a in spec.arms])
    x = arms[rng_stream(seed, _ARM_STREAM).choice(arms.size, size=n, p=probs)]
    u = spec.noise.sample(rng_stream(seed, _NOISE_STREAM), n)
    y = np.asarray(spec.response(x, u), dtype=float)
    if not np.isfinite(y).all():
        raise ValidationError(f"{spec.name}: response produced non-finite outcomes")
    return ObservationTable(x, y)


# -- enumeration oracle ----------------------------------------------------------------

def _contrast(scm: DiscreteScm, arms: ArmPair, centered: bool) -> np.ndarray:
    d = scm.outcomes[arms.i] - scm.outcomes[arms.j]
    if centered:
        d = d - (scm.arm_mean(arms.i) - scm.arm_mean(arms.j))
    return d


def exact_moment(scm: DiscreteScm, arms, m: int, centered: bool = False) -> float:
    """Sum over u of P(u) (f(i,u) - f(j,u))^m, centered on the exact ACE if asked."""
    d = _contrast(scm, ArmPair.coerce(arms), centered)
    return math.fsum(scm.probs * d ** m)


def exact_product_moment(scm: DiscreteScm, arms_left, arms_right, centered: bool = False) -> float:
    d1 = _contrast(scm, ArmPair.coerce(arms_left), centered)
    d2 = _contrast(scm, ArmPair.coerce(arms_right), centered)
    return math.fsum(scm.probs * d1 * d2)


# -- cell quadrature with population CDFs ----------------------------------------------

def _cells(cdfs, scm: DiscreteScm, arms: Sequence[int]):
    atoms = np.unique(np.concatenate([scm.outcomes[a] - cdfs[a].center for a in arms]))
    if atoms.size < 2:
        return None
    return 0.5 * (atoms[:-1] + atoms[1:]), np.diff(atoms)


def symmetric_cell_integral(integrand: Integrand, mids: np.ndarray, lengths: np.ndarray) -> np.ndarray:
    """Exact integral of a coordinate-symmetric, cellwise-constant integrand.

    Only multisets of cells need evaluating; each carries its multinomial count.
    """
    m = integrand.dim
    combos = np.array(list(combinations_with_replacement(range(mids.size), m)), dtype=np.int64)
    fact_m = math.factorial(m)
    multiplicity = np.array([fact_m // math.prod(math.factorial(c) for c in Counter(row).values())
                             for row in combos.tolist()], dtype=float)
    weights = multiplicity * np.prod(lengths[combos], axis=1)
    values = np.asarray(integrand(mids[combos]), dtype=float).reshape(len(combos), -1)
    return np.array([math.fsum(weights * values[:, c]) for c in range(values.shape[1])])


def grid_cell_integral(integrand: Integrand, mids: np.ndarray, lengths: np.ndarray) -> np.ndarray:
    """Exact integral of a cellwise-constant 2-D integrand over every ordered cell pair."""
    a, b = np.meshgrid(np.arange(mids.size), np.arange(mids.size), indexing="ij")
    a, b = a.ravel(), b.ravel()
    points = np.column_stack([mids[a], mids[b]])
    weights = lengths[a] * lengths[b]
    values = np.asarray(integrand(points), dtype=float).reshape(len(a), -1)
    return np.array([math.fsum(weights * values[:, c]) for c in range(values.shape[1])])


FORMULAS = ("moment", "central_moment", "moment_bounds", "central_moment_bounds",
            "product", "central_product", "product_bounds", "central_product_bounds")


def exact_identified_value(scm: DiscreteScm, formula: str, arms=None, m: Optional[int] = None,
                           arms_right=None):
    """Evaluate an identification (or bound) formula with the exact population CDFs.

    Returns a float for identified quantities and a ``(lower, upper)`` tuple
    for bounds. Comparing the result with :func:`exact_moment` or
    :func:`exact_product_moment` isolates identification error from
    estimation error.
    """
    if formula not in FORMULAS:
        raise ValidationError(f"unknown formula {formula!r}; choose from {FORMULAS}")
    centered = formula.startswith("central")
    is_bounds = formula.endswith("bounds")
    left = ArmPair.coerce(arms)
    if "product" in formula:
        right = ArmPair.coerce(arms_right)
        used = [left.i, left.j, right.i, right.j]
        cdfs = {a: scm.population_cdf(a, centered) for a in set(used)}
        cells = _cells(cdfs, scm, used)
        named = {"i": cdfs[left.i], "j": cdfs[left.j], "k": cdfs[right.i], "h": cdfs[right.j]}
        integrand = product_bounds_integrand(named) if is_bounds else product_integrand(named)
        if cells is None:
            return (0.0, 0.0) if is_bounds else 0.0
        out = grid_cell_integral(integrand, *cells)
    else:
        if m is None or m < 1:
            raise ValidationError("moment formulas need an order m >= 1")
        cdfs = {a: scm.population_cdf(a, centered) for a in (left.i, left.j)}
        cells = _cells(cdfs, scm, [left.i, left.j])
        if is_bounds:
            integrand = moment_bounds_integrand(cdfs[left.i], cdfs[left.j], m)
        else:
            integrand = moment_integrand(cdfs[left.i], cdfs[left.j], m)
        if cells is None:
            return (0.0, 0.0) if is_bounds else 0.0
        out = symmetric_cell_integral(integrand, *cells)
    if is_bounds:
        return float(out[0]), float(out[1])
    return float(out[0])


# -- randomized test corpus ------------------------------------------------------------

def random_discrete_scm(seed: int, monotone: bool = True, arms: Sequence[int] = (-1, 0, 1),
                        max_support: int = 6, name: Optional[str] = None) -> DiscreteScm:
    """Random finite-support SCM; ``monotone`` makes every response nondecreasing in u."""
    rng = rng_stream(seed, 7)
    k = int(rng.integers(2, max_support + 1))
    support = np.sort(rng.choice(np.arange(-20, 21), size=k, replace=False) / 4.0)
    probs = rng.dirichlet(np.ones(k))
    probs[-1] = 1.0 - math.fsum(probs[:-1])
    # floor each arm at 0.1 so moderate samples see every arm
    floor = min(0.1, 0.5 / len(arms))
    arm_probs = floor + (1.0 - floor * len(arms)) * rng.dirichlet(np.ones(len(arms)))
    arm_probs[-1] = 1.0 - math.fsum(arm_probs[:-1])
    outcomes = {}
    for arm in arms:
        vals = np.round(rng.normal(scale=2.0, size=k), 3)
        outcomes[arm] = np.sort(vals) if monotone else vals
    return DiscreteScm(name or f"random-{'mono' if monotone else 'free'}-{seed}",
                       dict(zip(arms, arm_probs.tolist())), support, probs, outcomes)


def monotone_corpus(seed: int = 0, size: int = 20) -> List[DiscreteScm]:
    return [random_discrete_scm(seed * 1000 + k, monotone=True) for k in range(size)]


def unrestricted_corpus(seed: int = 0, size: int = 20) -> List[DiscreteScm]:
    return [random_discrete_scm(seed * 1000 + k + 500, monotone=False) for k in range(size)]


def example_corpus() -> List[DiscreteScm]:
    """Examples 1-3 and SCM A with their noise laws discretized."""
    out = [discretized_example(n) for n in ("example-1", "example-2", "example-3")]
    out.append(discretized_example("scm-a", support=(-1.0, -0.5, 0.0, 0.5, 1.0)))
    return out
