"""Frechet-inequality bounds that need exogeneity only (no monotonicity)."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import List, Optional, Tuple

from .data import ObservationTable, empirical_cdf
from .errors import EstimationQualityError
from .identify import (ArmPair, _check_order, _product_cdfs, _require_arms, _resolve, clip_nonnegative,
                       clip_unit, guard_denominator)
from .integrands import frechet_integrands, moment_bounds_integrand, product_bounds_integrand
from .quadrature import IntegrationConfig, integrate_with_error

__all__ = [
    "Interval", "frechet_integrands", "moment_bounds", "product_bounds", "skewness_bounds",
    "kurtosis_bounds", "correlation_bounds", "reconcile",
]

INVERSION_SE_MULTIPLE = 3.0


@dataclass(frozen=True)
class Interval:
    """Closed interval [lower, upper] with optional Monte Carlo errors.

    ``sharp`` names the side that is attainable (``"upper"``) or ``"none"``.
    """

    lower: float
    upper: float
    lower_stderr: Optional[float] = None
    upper_stderr: Optional[float] = None
    flags: Tuple[str, ...] = ()
    sharp: str = "none"

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, value: float, slack: float = 0.0) -> bool:
        return self.lower - slack <= value <= self.upper + slack


def reconcile(lower: float, upper: float, lower_se: Optional[float] = None, upper_se: Optional[float] = None,
              flags: Optional[List[str]] = None, sharp: str = "none") -> Interval:
    """Build an interval, swapping endpoints that Monte Carlo noise inverted.

    An inversion larger than three combined standard errors is treated as
    under-sampling and raised rather than silently repaired.
    """
    flags = list(flags or [])
    if lower > upper:
        se = math.hypot(lower_se or 0.0, upper_se or 0.0)
        if lower - upper <= INVERSION_SE_MULTIPLE * se:
            flags.append("swapped_inverted_interval")
            lower, upper = upper, lower
            lower_se, upper_se = upper_se, lower_se
        else:
            raise EstimationQualityError(
                f"bound interval inverted by {lower - upper:.4g} (> {INVERSION_SE_MULTIPLE} x SE {se:.3g}); "
                "increase the Monte Carlo point count")
    return Interval(lower, upper, lower_se, upper_se, tuple(flags), sharp)


def moment_bounds(table: ObservationTable, m: int, arms, centered: bool = False,
                  config: Optional[IntegrationConfig] = None) -> Interval:
    """Bounds on E[(Y_i - Y_j)^m] (or the central moment when ``centered``)."""
    m = _check_order(m)
    arms = ArmPair.coerce(arms)
    _require_arms(table, arms.i, arms.j)
    config, bounds = _resolve(table, config, centered, m)
    cdf_i = empirical_cdf(table, arms.i, centered)
    cdf_j = empirical_cdf(table, arms.j, centered)
    res = integrate_with_error(moment_bounds_integrand(cdf_i, cdf_j, m), replace(config, dimension=None), bounds)
    sharp = "upper" if m % 2 == 0 else "none"
    return reconcile(float(res.value[0]), float(res.value[1]), float(res.stderr[0]), float(res.stderr[1]),
                     sharp=sharp)


def product_bounds(table: ObservationTable, arms_left, arms_right, centered: bool = False,
                   config: Optional[IntegrationConfig] = None) -> Interval:
    """Bounds on E[(Y_i - Y_j)(Y_k - Y_h)] (the covariance when ``centered``)."""
    left, right = ArmPair.coerce(arms_left), ArmPair.coerce(arms_right)
    config, bounds = _resolve(table, config, centered, 2)
    cdfs = _product_cdfs(table, left, right, centered)
    res = integrate_with_error(product_bounds_integrand(cdfs), config, bounds)
    return reconcile(float(res.value[0]), float(res.value[1]), float(res.stderr[0]), float(res.stderr[1]))


def _central_bounds(table, m, arms, config):
    return moment_bounds(table, m, arms, centered=True,
                         config=None if config is None else replace(config, dimension=None))


def skewness_bounds(table: ObservationTable, arms, config: Optional[IntegrationConfig] = None) -> Interval:
    """Bounds on the skewness of Y_i - Y_j from central-moment bounds of order 2 and 3."""
    flags: List[str] = []
    second = _central_bounds(table, 2, arms, config)
    third = _central_bounds(table, 3, arms, config)
    var_lo = clip_nonnegative(second.lower, flags, "variance_lower")
    var_hi = clip_nonnegative(second.upper, flags, "variance_upper")
    if third.lower >= 0:
        lower = third.lower / guard_denominator(var_hi ** 1.5, flags, "skewness_lower")
    else:
        lower = third.lower / guard_denominator(var_lo ** 1.5, flags, "skewness_lower")
    if third.upper >= 0:
        upper = third.upper / guard_denominator(var_lo ** 1.5, flags, "skewness_upper")
    else:
        upper = third.upper / guard_denominator(var_hi ** 1.5, flags, "skewness_upper")
    return reconcile(lower, upper, flags=flags)


def kurtosis_bounds(table: ObservationTable, arms, config: Optional[IntegrationConfig] = None) -> Interval:
    """Bounds on the kurtosis of Y_i - Y_j from central-moment bounds of order 2 and 4."""
    flags: List[str] = []
    second = _central_bounds(table, 2, arms, config)
    fourth = _central_bounds(table, 4, arms, config)
    var_lo = clip_nonnegative(second.lower, flags, "variance_lower")
    var_hi = clip_nonnegative(second.upper, flags, "variance_upper")
    lower = fourth.lower / guard_denominator(var_hi ** 2, flags, "kurtosis_lower")
    upper = fourth.upper / guard_denominator(var_lo ** 2, flags, "kurtosis_upper")
    return reconcile(lower, upper, flags=flags)


def correlation_bounds(table: ObservationTable, arms_left, arms_right,
                       config: Optional[IntegrationConfig] = None) -> Interval:
    """Bounds on the correlation of two causal effects, clipped to [-1, 1]."""
    flags: List[str] = []
    cov = product_bounds(table, arms_left, arms_right, centered=True, config=config)
    left = _central_bounds(table, 2, ArmPair.coerce(arms_left), config)
    right = _central_bounds(table, 2, ArmPair.coerce(arms_right), config)
    sd_lo = (math.sqrt(clip_nonnegative(left.lower, flags, "variance_left_lower"))
             * math.sqrt(clip_nonnegative(right.lower, flags, "variance_right_lower")))
    sd_hi = (math.sqrt(clip_nonnegative(left.upper, flags, "variance_left_upper"))
             * math.sqrt(clip_nonnegative(right.upper, flags, "variance_right_upper")))
    if cov.lower >= 0:
        lower = cov.lower / guard_denominator(sd_hi, flags, "correlation_lower")
    else:
        lower = cov.lower / guard_denominator(sd_lo, flags, "correlation_lower")
    if cov.upper >= 0:
        upper = cov.upper / guard_denominator(sd_lo, flags, "correlation_upper")
    else:
        upper = cov.upper / guard_denominator(sd_hi, flags, "correlation_upper")
    lower = clip_unit(lower, flags, "correlation_lower")
    upper = clip_unit(upper, flags, "correlation_upper")
    return reconcile(lower, upper, flags=flags)
