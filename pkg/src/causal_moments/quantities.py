"""Named quantities: one place that maps a request to the right estimator.

Every quantity can be evaluated plainly, bootstrapped, and wrapped into an
:class:`~causal_moments.report.EstimateReport`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Union


from . import bounds as _bounds
from . import identify as _identify
from .bootstrap import BootstrapConfig, bootstrap_replicates, percentile_interval
from .bounds import Interval
from .data import ObservationTable
from .errors import CausalMomentsError, ValidationError
from .identify import ArmPair, Estimate, clip_nonnegative, guard_denominator
from .quadrature import IntegrationConfig
from .report import EstimateReport

POINT_KINDS = ("moment", "central_moment", "product", "covariance", "correlation", "ate",
               "variance", "std_dev", "skewness", "kurtosis")
BOUND_KINDS = ("moment_bounds", "central_moment_bounds", "product_bounds", "covariance_bounds",
               "correlation_bounds", "skewness_bounds", "kurtosis_bounds")
TWO_CONTRAST = {"product", "covariance", "correlation", "product_bounds", "covariance_bounds",
                "correlation_bounds"}
ORDERED = {"moment", "central_moment", "moment_bounds", "central_moment_bounds"}


@dataclass(frozen=True)
class QuantitySpec:
    """What to estimate: ``kind`` plus its arm contrast(s) and, for moments, the order."""

    kind: str
    arms: ArmPair
    arms_right: Optional[ArmPair] = None
    order: Optional[int] = None

    def __post_init__(self):
        if self.kind not in POINT_KINDS + BOUND_KINDS:
            raise ValidationError(f"unknown quantity {self.kind!r}")
        object.__setattr__(self, "arms", ArmPair.coerce(self.arms))
        if self.kind in TWO_CONTRAST:
            if self.arms_right is None:
                raise ValidationError(f"{self.kind} needs a second arm pair")
            object.__setattr__(self, "arms_right", ArmPair.coerce(self.arms_right))
        if self.kind in ORDERED:
            _identify._check_order(self.order)

    @property
    def is_bounds(self) -> bool:
        return self.kind in BOUND_KINDS

    def arms_field(self):
        if self.arms_right is None:
            return tuple(self.arms.as_list())
        return (tuple(self.arms.as_list()), tuple(self.arms_right.as_list()))


def _central(table, m, arms, config):
    return _identify.central_moment_identified(table, m, arms, config).value


def evaluate(table: ObservationTable, spec: QuantitySpec,
             config: Optional[IntegrationConfig] = None) -> Union[Estimate, Interval]:
    kind, arms, right = spec.kind, spec.arms, spec.arms_right
    if kind == "moment":
        return _identify.moment_identified(table, spec.order, arms, config)
    if kind == "central_moment":
        return _identify.central_moment_identified(table, spec.order, arms, config)
    if kind == "product":
        return _identify.product_moment_identified(table, arms, right, config)
    if kind == "covariance":
        return _identify.central_product_moment_identified(table, arms, right, config)
    if kind == "correlation":
        return _identify.correlation_identified(table, arms, right, config)
    if kind == "ate":
        return Estimate(_identify.ate(table, arms))
    if kind in ("variance", "std_dev", "skewness", "kurtosis"):
        flags: List[str] = []
        var = clip_nonnegative(_central(table, 2, arms, config), flags, "variance")
        if kind == "variance":
            return Estimate(var, None, tuple(flags))
        if kind == "std_dev":
            return Estimate(math.sqrt(var), None, tuple(flags))
        if kind == "skewness":
            value = _central(table, 3, arms, config) / guard_denominator(var ** 1.5, flags, "skewness")
        else:
            value = _central(table, 4, arms, config) / guard_denominator(var ** 2, flags, "kurtosis")
        return Estimate(value, None, tuple(flags))
    if kind == "moment_bounds":
        return _bounds.moment_bounds(table, spec.order, arms, config=config)
    if kind == "central_moment_bounds":
        return _bounds.moment_bounds(table, spec.order, arms, centered=True, config=config)
    if kind == "product_bounds":
        return _bounds.product_bounds(table, arms, right, config=config)
    if kind == "covariance_bounds":
        return _bounds.product_bounds(table, arms, right, centered=True, config=config)
    if kind == "correlation_bounds":
        return _bounds.correlation_bounds(table, arms, right, config)
    if kind == "skewness_bounds":
        return _bounds.skewness_bounds(table, arms, config)
    return _bounds.kurtosis_bounds(table, arms, config)


def _values(result) -> List[float]:
    if isinstance(result, Interval):
        return [result.lower, result.upper]
    return [float(result.value)]


def run_quantity(table: ObservationTable, spec: QuantitySpec, config: Optional[IntegrationConfig] = None,
                 bootstrap: Optional[BootstrapConfig] = None, extra_config: Optional[dict] = None) -> EstimateReport:
    """Evaluate one quantity (optionally bootstrapped) into a report; package errors become error entries."""
    config = config or IntegrationConfig()
    record = {"integration": config.to_dict(), "bootstrap": None if bootstrap is None else bootstrap.to_dict(),
              "denominator_guard": _identify.DENOMINATOR_GUARD}
    record.update(extra_config or {})
    order = spec.order if spec.kind in ORDERED else None
    try:
        result = evaluate(table, spec, config)
        flags = list(result.flags)
        if isinstance(result, Interval):
            estimate = {"lower": result.lower, "upper": result.upper, "sharp": result.sharp}
        else:
            estimate = float(result.value)
        ci = None
        if bootstrap is not None:
            def estimator(sample, mc_seed):
                return _values(evaluate(sample, spec, config.with_seed(mc_seed)))

            values, failures = bootstrap_replicates(estimator, table, bootstrap)
            lower, upper = percentile_interval(values, bootstrap.level)
            lo, hi = (float(lower[0]), float(upper[-1]))
            ci = {"lower": lo, "upper": hi, "level": bootstrap.level,
                  "replicate_mean": [math.fsum(values[:, c].tolist()) / values.shape[0]
                                     for c in range(values.shape[1])]}
            if values.shape[1] == 1:
                ci["replicate_mean"] = ci["replicate_mean"][0]
            if failures:
                flags.append(f"bootstrap_failures:{failures}/{bootstrap.replicates}")
    except CausalMomentsError as exc:
        return EstimateReport(spec.kind, spec.arms_field(), order, None, None, (), record,
                              f"{type(exc).__name__}: {exc}")
    return EstimateReport(spec.kind, spec.arms_field(), order, estimate, ci, tuple(flags), record)
