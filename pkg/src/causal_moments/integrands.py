"""Pointwise integrands built from conditional CDFs.

Every function here takes CDF callables (``F(y) = P(Y < y | X = arm)``,
vectorised) so the same code serves empirical CDFs from data and exact
population CDFs from a finite-support SCM.

Naming: ``F_hi`` is the CDF of the arm whose potential outcome sits above the
integration point and ``F_lo`` of the one below, i.e. the joint event
``Y_lo < y_p <= Y_hi`` for every coordinate p. For the contrast Y_i - Y_j the
positive part uses ``(F_hi, F_lo) = (F_i, F_j)``.
"""
from __future__ import annotations

from typing import Callable, Mapping

import numpy as np

from .quadrature import Integrand

Cdf = Callable[[np.ndarray], np.ndarray]


# -- one-contrast family (dimension m) -------------------------------------------------

def comonotone_mass(F_hi: np.ndarray, F_lo: np.ndarray) -> np.ndarray:
    """max{min_p F_lo(y_p) - max_p F_hi(y_p), 0} from full ``(n, m)`` CDF matrices."""
    return np.maximum(F_lo.min(axis=1) - F_hi.max(axis=1), 0.0)


def comonotone_mass_reduced(cdf_hi: Cdf, cdf_lo: Cdf, points: np.ndarray) -> np.ndarray:
    """Same as :func:`comonotone_mass` using only each point's min and max coordinate.

    Valid because a CDF is nondecreasing: min_p F(y_p) = F(min_p y_p).
    """
    return np.maximum(cdf_lo(points.min(axis=1)) - cdf_hi(points.max(axis=1)), 0.0)


def frechet_lower(F_hi: np.ndarray, F_lo: np.ndarray) -> np.ndarray:
    m = F_hi.shape[1]
    return np.maximum(F_lo.sum(axis=1) - F_hi.sum(axis=1) - m + 1, 0.0)


def frechet_upper(F_hi: np.ndarray, F_lo: np.ndarray) -> np.ndarray:
    return np.minimum(F_lo.min(axis=1), 1.0 - F_hi.max(axis=1))


def frechet_integrands(m: int, cdf_i: Cdf, cdf_j: Cdf):
    """(l, u): pointwise lower and upper bounds on P(Y_j < y_p <= Y_i for all p)."""

    def lower(points):
        return frechet_lower(cdf_i(points), cdf_j(points))

    def upper(points):
        return frechet_upper(cdf_i(points), cdf_j(points))

    return (Integrand(m, lower, value_range=(0.0, 1.0)),
            Integrand(m, upper, value_range=(0.0, 1.0)))


def moment_integrand(cdf_i: Cdf, cdf_j: Cdf, m: int) -> Integrand:
    """Integrand whose integral identifies E[(Y_i - Y_j)^m] under monotonicity."""
    sign = -1.0 if m % 2 else 1.0

    def fn(points):
        pos = comonotone_mass_reduced(cdf_i, cdf_j, points)
        neg = comonotone_mass_reduced(cdf_j, cdf_i, points)
        return pos + sign * neg

    return Integrand(m, fn, value_range=(-1.0, 1.0))


def moment_bound_terms(F_i: np.ndarray, F_j: np.ndarray):
    """Lower and upper integrand values for the m-th moment of Y_i - Y_j."""
    m = F_i.shape[1]
    l_pos, u_pos = frechet_lower(F_i, F_j), frechet_upper(F_i, F_j)
    l_neg, u_neg = frechet_lower(F_j, F_i), frechet_upper(F_j, F_i)
    if m % 2 == 0:
        return l_pos + l_neg, u_pos + u_neg
    return l_pos - u_neg, u_pos - l_neg


def moment_profile_integrand(cdf_i: Cdf, cdf_j: Cdf, m: int) -> Integrand:
    """Width-3 integrand: (identified, lower bound, upper bound) on shared points."""

    def fn(points):
        return moment_profile_values(cdf_i(points), cdf_j(points))

    return Integrand(m, fn, width=3)


def moment_profile_values(F_i: np.ndarray, F_j: np.ndarray) -> np.ndarray:
    """``(n, 3)`` identified, lower and upper values from ``(n, m)`` CDF matrices."""
    m = F_i.shape[1]
    # each row reduction is shared by several terms, so take it once
    min_i, max_i, sum_i = F_i.min(axis=1), F_i.max(axis=1), F_i.sum(axis=1)
    min_j, max_j, sum_j = F_j.min(axis=1), F_j.max(axis=1), F_j.sum(axis=1)
    pos = np.maximum(min_j - max_i, 0.0)
    neg = np.maximum(min_i - max_j, 0.0)
    l_pos = np.maximum(sum_j - sum_i - m + 1, 0.0)
    l_neg = np.maximum(sum_i - sum_j - m + 1, 0.0)
    u_pos = np.minimum(min_j, 1.0 - max_i)
    u_neg = np.minimum(min_i, 1.0 - max_j)
    if m % 2 == 0:
        return np.column_stack([pos + neg, l_pos + l_neg, u_pos + u_neg])
    return np.column_stack([pos - neg, l_pos - u_neg, u_pos - l_neg])


def moment_bounds_integrand(cdf_i: Cdf, cdf_j: Cdf, m: int) -> Integrand:
    """Width-2 integrand: (lower, upper) for the m-th moment of Y_i - Y_j."""

    def fn(points):
        lo, hi = moment_bound_terms(cdf_i(points), cdf_j(points))
        return np.column_stack([lo, hi])

    return Integrand(m, fn, width=2)


# -- two-contrast family (dimension 2) -------------------------------------------------
#
# Axis 0 carries the contrast (i, j), axis 1 carries (k, h). ``F`` maps each arm
# label to its CDF evaluated on the relevant axis.

def pair_mass(F1_hi, F1_lo, F2_hi, F2_lo):
    """max{min{F1_lo, F2_lo} - max{F1_hi, F2_hi}, 0}."""
    return np.maximum(np.minimum(F1_lo, F2_lo) - np.maximum(F1_hi, F2_hi), 0.0)


def pair_lower(F1_hi, F1_lo, F2_hi, F2_lo):
    return np.maximum(F1_lo - F1_hi + F2_lo - F2_hi - 1.0, 0.0)


def pair_upper(F1_hi, F1_lo, F2_hi, F2_lo):
    return np.minimum(np.minimum(F1_lo, F2_lo), 1.0 - np.maximum(F1_hi, F2_hi))


def _axis_values(cdfs: Mapping[str, Cdf], points: np.ndarray):
    y1, y2 = points[:, 0], points[:, 1]
    return cdfs["i"](y1), cdfs["j"](y1), cdfs["k"](y2), cdfs["h"](y2)


def product_terms(Fi, Fj, Fk, Fh):
    """(identified, lower, upper) pointwise values for E[(Y_i - Y_j)(Y_k - Y_h)]."""
    # four sign patterns of the two contrasts: (+,+), (-,+), (+,-), (-,-)
    pp = (Fi, Fj, Fk, Fh)
    mp = (Fj, Fi, Fk, Fh)
    pm = (Fi, Fj, Fh, Fk)
    mm = (Fj, Fi, Fh, Fk)
    ident = pair_mass(*pp) - pair_mass(*mp) - pair_mass(*pm) + pair_mass(*mm)
    lower = pair_lower(*pp) - pair_upper(*mp) - pair_upper(*pm) + pair_lower(*mm)
    upper = pair_upper(*pp) - pair_lower(*mp) - pair_lower(*pm) + pair_upper(*mm)
    return ident, lower, upper


def product_integrand(cdfs: Mapping[str, Cdf]) -> Integrand:
    """Integrand identifying the product moment; ``cdfs`` keyed by 'i', 'j', 'k', 'h'."""

    def fn(points):
        Fi, Fj, Fk, Fh = _axis_values(cdfs, points)
        pp = pair_mass(Fi, Fj, Fk, Fh)
        mp = pair_mass(Fj, Fi, Fk, Fh)
        pm = pair_mass(Fi, Fj, Fh, Fk)
        mm = pair_mass(Fj, Fi, Fh, Fk)
        return pp - mp - pm + mm

    return Integrand(2, fn, value_range=(-2.0, 2.0))


def product_profile_integrand(cdfs: Mapping[str, Cdf]) -> Integrand:
    def fn(points):
        return np.column_stack(product_terms(*_axis_values(cdfs, points)))

    return Integrand(2, fn, width=3)


def product_bounds_integrand(cdfs: Mapping[str, Cdf]) -> Integrand:
    def fn(points):
        _, lo, hi = product_terms(*_axis_values(cdfs, points))
        return np.column_stack([lo, hi])

    return Integrand(2, fn, width=2)
