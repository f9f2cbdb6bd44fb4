"""Estimation within strata of a discrete covariate W."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from .bootstrap import BootstrapConfig
from .data import ObservationTable
from .errors import NoDataError, SchemaError
from .quadrature import IntegrationConfig
from .quantities import QuantitySpec, run_quantity
from .report import EstimateReport


@dataclass(frozen=True)
class StratumRequest:
    covariate_level: int
    inner: QuantitySpec


def stratify(table: ObservationTable, w: int) -> ObservationTable:
    """Rows with covariate equal to ``w``; arms are recomputed on the sub-table."""
    if not table.has_covariate:
        raise SchemaError("table has no covariate column 'w'")
    rows = np.flatnonzero(table.w == int(w))
    if rows.size == 0:
        raise NoDataError(f"no rows with covariate w={w}")
    return table.take(rows)


def stratum_weights(table: ObservationTable) -> Dict[int, float]:
    """Empirical P(W = w) for every observed level."""
    if not table.has_covariate:
        raise SchemaError("table has no covariate column 'w'")
    levels, counts = np.unique(table.w, return_counts=True)
    return {int(k): int(c) / len(table) for k, c in zip(levels, counts)}


def conditional_estimate(table: ObservationTable, req: StratumRequest,
                         config: Optional[IntegrationConfig] = None,
                         bootstrap: Optional[BootstrapConfig] = None) -> EstimateReport:
    """The unconditional estimator applied to the stratum W = w.

    Domain bounds and centering are re-derived inside the stratum, so the
    result equals ``run_quantity(stratify(table, w), ...)`` exactly.
    """
    stratum = stratify(table, req.covariate_level)
    return run_quantity(stratum, req.inner, config, bootstrap,
                        extra_config={"condition_on": {"w": int(req.covariate_level)}})
