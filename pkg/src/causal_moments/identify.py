"""Point-identified moments of causal effects (exogeneity + monotonicity).

All estimators plug empirical conditional CDFs into the comonotone integrands
of :mod:`causal_moments.integrands` and integrate them by Monte Carlo over the
data-derived domain (or ``config.bounds`` when given).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import List, Optional, Tuple

from .data import ObservationTable, conditional_mean, domain_bounds, empirical_cdf
from .errors import ConfigError, DegenerateEffectWarning, InvalidOrderError, NoDataError, ValidationError
from .integrands import (moment_integrand, moment_profile_integrand, moment_profile_values, product_integrand,
                         product_profile_integrand)
from .quadrature import IntegrationConfig, integrate_with_error, joint_points, summarize_samples

DENOMINATOR_GUARD = 0.01


@dataclass(frozen=True)
class ArmPair:
    """The contrast Y_i - Y_j (``i`` treated, ``j`` control)."""

    i: int
    j: int

    def __post_init__(self):
        if self.i == self.j:
            raise ValidationError(f"arm pair needs two different arms, got ({self.i}, {self.j})")

    @classmethod
    def parse(cls, text: str) -> "ArmPair":
        parts = [p.strip() for p in str(text).split(",")]
        if len(parts) != 2:
            raise ValidationError(f"arm pair must look like 'i,j', got {text!r}")
        try:
            return cls(int(parts[0]), int(parts[1]))
        except ValueError:
            raise ValidationError(f"arm pair must hold integers, got {text!r}") from None

    @classmethod
    def coerce(cls, value) -> "ArmPair":
        if isinstance(value, ArmPair):
            return value
        if isinstance(value, str):
            return cls.parse(value)
        i, j = value
        return cls(int(i), int(j))

    def reversed(self) -> "ArmPair":
        return ArmPair(self.j, self.i)

    def as_list(self) -> List[int]:
        return [self.i, self.j]


@dataclass(frozen=True)
class Estimate:
    """A scalar estimate with its Monte Carlo standard error and any guard flags."""

    value: float
    stderr: Optional[float] = None
    flags: Tuple[str, ...] = ()

    def __float__(self):
        return float(self.value)


@dataclass(frozen=True)
class MomentRequest:
    order: int
    arms: ArmPair
    centered: bool = False
    config: IntegrationConfig = field(default_factory=IntegrationConfig)


@dataclass(frozen=True)
class DerivedStats:
    variance: float
    std_dev: float
    skewness: float
    kurtosis: float
    flags: Tuple[str, ...] = ()


def _check_order(m) -> int:
    if isinstance(m, bool) or int(m) != m or m < 1:
        raise InvalidOrderError(f"moment order must be a positive integer, got {m!r}")
    return int(m)


def _require_arms(table: ObservationTable, *arms: int) -> None:
    missing = sorted({a for a in arms if a not in table.arms})
    if missing:
        raise NoDataError(f"arm(s) {missing} have no rows; table has arms {sorted(table.arms)}")


def _resolve(table: ObservationTable, config: Optional[IntegrationConfig], centered: bool, dim: int):
    config = config or IntegrationConfig()
    if config.dimension is not None and config.dimension != dim:
        raise ConfigError(f"config dimension {config.dimension} does not match required dimension {dim}")
    bounds = config.bounds if config.bounds is not None else domain_bounds(table, centered)
    return config, bounds


def guard_denominator(value: float, flags: List[str], label: str) -> float:
    """Replace a denominator smaller than 0.01 in magnitude by 0.01."""
    if abs(value) < DENOMINATOR_GUARD:
        flags.append(f"denominator_guard:{label}")
        warnings.warn(f"{label} denominator {value:.3g} replaced by {DENOMINATOR_GUARD}",
                      DegenerateEffectWarning, stacklevel=3)
        return DENOMINATOR_GUARD
    return value


def clip_nonnegative(value: float, flags: List[str], label: str) -> float:
    if value < 0:
        flags.append(f"clipped_negative:{label}")
        return 0.0
    return value


def clip_unit(value: float, flags: List[str], label: str) -> float:
    if value > 1.0 or value < -1.0:
        flags.append(f"clipped_to_unit:{label}")
        return max(-1.0, min(1.0, value))
    return value


def _moment(table, m, arms, config, centered) -> Estimate:
    m = _check_order(m)
    arms = ArmPair.coerce(arms)
    _require_arms(table, arms.i, arms.j)
    config, bounds = _resolve(table, config, centered, m)
    cdf_i = empirical_cdf(table, arms.i, centered)
    cdf_j = empirical_cdf(table, arms.j, centered)
    res = integrate_with_error(moment_integrand(cdf_i, cdf_j, m), replace(config, dimension=None), bounds)
    return Estimate(res.value, res.stderr)


def moment_identified(table: ObservationTable, m: int, arms, config: Optional[IntegrationConfig] = None) -> Estimate:
    """Plug-in estimate of E[(Y_i - Y_j)^m]."""
    return _moment(table, m, arms, config, centered=False)


def central_moment_identified(table: ObservationTable, m: int, arms,
                              config: Optional[IntegrationConfig] = None) -> Estimate:
    """Plug-in estimate of E[{(Y_i - Y_j) - (E[Y_i] - E[Y_j])}^m] using centered CDFs."""
    return _moment(table, m, arms, config, centered=True)


def estimate_moment(table: ObservationTable, request: MomentRequest) -> Estimate:
    return _moment(table, request.order, request.arms, request.config, request.centered)


def moment_profile(table: ObservationTable, m: int, arms, config: Optional[IntegrationConfig] = None,
                   centered: bool = False):
    """Identified value and both bounds for one order, evaluated on shared points.

    Returns ``(identified, lower, upper)`` as :class:`Estimate` objects; the
    identified value is bit-identical to :func:`moment_identified` with the
    same config.
    """
    m = _check_order(m)
    arms = ArmPair.coerce(arms)
    _require_arms(table, arms.i, arms.j)
    config, bounds = _resolve(table, config, centered, m)
    cdf_i = empirical_cdf(table, arms.i, centered)
    cdf_j = empirical_cdf(table, arms.j, centered)
    res = integrate_with_error(moment_profile_integrand(cdf_i, cdf_j, m), replace(config, dimension=None), bounds)
    return tuple(Estimate(float(v), float(s)) for v, s in zip(res.value, res.stderr))


def moment_profiles(table: ObservationTable, orders, arms, config: Optional[IntegrationConfig] = None,
                    centered: bool = False):
    """``{m: (identified, lower, upper)}`` for several orders at once.

    In joint mode each order's sample is a leading block of the largest
    order's sample, so the CDFs are evaluated once and sliced. Results are
    bit-identical to calling :func:`moment_profile` per order.
    """
    orders = sorted({_check_order(m) for m in orders})
    arms = ArmPair.coerce(arms)
    _require_arms(table, arms.i, arms.j)
    config = _flat(config)
    config, bounds = _resolve(table, config, centered, max(orders))
    if config.mode != "joint" or bounds.a == bounds.b:
        return {m: moment_profile(table, m, arms, config, centered) for m in orders}
    cdf_i = empirical_cdf(table, arms.i, centered)
    cdf_j = empirical_cdf(table, arms.j, centered)
    points = joint_points(bounds, max(config.joint_points(m) for m in orders), max(orders), config.seed)
    F_i, F_j = cdf_i(points), cdf_j(points)
    out = {}
    for m in orders:
        n = config.joint_points(m)
        res = summarize_samples(moment_profile_values(F_i[:n, :m], F_j[:n, :m]), bounds.width ** m, 3)
        out[m] = tuple(Estimate(float(v), float(s)) for v, s in zip(res.value, res.stderr))
    return out


def _product_cdfs(table, left: ArmPair, right: ArmPair, centered: bool):
    _require_arms(table, left.i, left.j, right.i, right.j)
    return {
        "i": empirical_cdf(table, left.i, centered),
        "j": empirical_cdf(table, left.j, centered),
        "k": empirical_cdf(table, right.i, centered),
        "h": empirical_cdf(table, right.j, centered),
    }


def _product(table, arms_left, arms_right, config, centered) -> Estimate:
    left, right = ArmPair.coerce(arms_left), ArmPair.coerce(arms_right)
    config, bounds = _resolve(table, config, centered, 2)
    cdfs = _product_cdfs(table, left, right, centered)
    res = integrate_with_error(product_integrand(cdfs), config, bounds)
    return Estimate(res.value, res.stderr)


def product_moment_identified(table: ObservationTable, arms_left, arms_right,
                              config: Optional[IntegrationConfig] = None) -> Estimate:
    """Plug-in estimate of E[(Y_i - Y_j)(Y_k - Y_h)]."""
    return _product(table, arms_left, arms_right, config, centered=False)


def central_product_moment_identified(table: ObservationTable, arms_left, arms_right,
                                      config: Optional[IntegrationConfig] = None) -> Estimate:
    """Plug-in estimate of the covariance of the two causal effects."""
    return _product(table, arms_left, arms_right, config, centered=True)


def product_profile(table: ObservationTable, arms_left, arms_right,
                    config: Optional[IntegrationConfig] = None, centered: bool = False):
    """(identified, lower, upper) product-moment estimates on shared points."""
    left, right = ArmPair.coerce(arms_left), ArmPair.coerce(arms_right)
    config, bounds = _resolve(table, config, centered, 2)
    cdfs = _product_cdfs(table, left, right, centered)
    res = integrate_with_error(product_profile_integrand(cdfs), config, bounds)
    return tuple(Estimate(float(v), float(s)) for v, s in zip(res.value, res.stderr))


def correlation_identified(table: ObservationTable, arms_left, arms_right,
                           config: Optional[IntegrationConfig] = None) -> Estimate:
    """Correlation of the two causal effects, clipped to [-1, 1].

    Each second central moment is clipped at 0 and the product of their
    square roots passes through the 0.01 denominator guard.
    """
    flags: List[str] = []
    cov = central_product_moment_identified(table, arms_left, arms_right, config).value
    var_left = central_moment_identified(table, 2, arms_left, _flat(config)).value
    var_right = central_moment_identified(table, 2, arms_right, _flat(config)).value
    var_left = clip_nonnegative(var_left, flags, "variance_left")
    var_right = clip_nonnegative(var_right, flags, "variance_right")
    denom = guard_denominator(math.sqrt(var_left) * math.sqrt(var_right), flags, "correlation")
    corr = clip_unit(cov / denom, flags, "correlation")
    return Estimate(corr, None, tuple(flags))


def _flat(config: Optional[IntegrationConfig]) -> Optional[IntegrationConfig]:
    # moments of order m pick their own dimension
    return None if config is None else replace(config, dimension=None)


def derived_stats(table: ObservationTable, arms, config: Optional[IntegrationConfig] = None) -> DerivedStats:
    """Variance, standard deviation, skewness and kurtosis of Y_i - Y_j."""
    flags: List[str] = []
    config = _flat(config)
    var = central_moment_identified(table, 2, arms, config).value
    third = central_moment_identified(table, 3, arms, config).value
    fourth = central_moment_identified(table, 4, arms, config).value
    var = clip_nonnegative(var, flags, "variance")
    skew = third / guard_denominator(var ** 1.5, flags, "skewness")
    kurt = fourth / guard_denominator(var ** 2, flags, "kurtosis")
    return DerivedStats(var, math.sqrt(var), skew, kurt, tuple(flags))


def ate(table: ObservationTable, arms) -> float:
    """Difference of arm means, E^[Y|X=i] - E^[Y|X=j]."""
    arms = ArmPair.coerce(arms)
    _require_arms(table, arms.i, arms.j)
    return conditional_mean(table, arms.i) - conditional_mean(table, arms.j)
