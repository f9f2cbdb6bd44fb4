import pytest

from causal_moments import (IntegrationConfig, correlation_bounds, correlation_identified, derived_stats,
                            kurtosis_bounds, moment_bounds, moment_profile, product_bounds, product_profile,
                            skewness_bounds)
from causal_moments.bounds import Interval, reconcile
from causal_moments.errors import EstimationQualityError
from causal_moments.synthetic import preset, simulate


def test_reconcile_swaps_small_inversions():
    iv = reconcile(1.0, 0.99, 0.01, 0.01)
    assert (iv.lower, iv.upper) == (0.99, 1.0)
    assert "swapped_inverted_interval" in iv.flags
    with pytest.raises(EstimationQualityError):
        reconcile(1.0, 0.5, 0.01, 0.01)


def test_interval_helpers():
    iv = Interval(0.0, 2.0)
    assert iv.width == 2.0 and iv.contains(2.05, slack=0.1) and not iv.contains(-0.2)


def test_scm_a_second_moment_bounds(scm_a_table):
    iv = moment_bounds(scm_a_table, 2, (1, 0))
    assert iv.sharp == "upper"
    assert iv.lower < 0.01 and 1.4 < iv.upper < 1.9
    assert moment_bounds(scm_a_table, 3, (1, 0), config=IntegrationConfig(n_joint=50_000)).sharp == "none"


def test_bounds_match_profile(scm_a_table, fast):
    _, lo, hi = moment_profile(scm_a_table, 2, (1, 0), fast)
    iv = moment_bounds(scm_a_table, 2, (1, 0), config=fast)
    assert (iv.lower, iv.upper) == (lo.value, hi.value)


def test_scm_b_product_bounds(scm_b_table):
    iv = product_bounds(scm_b_table, (1, 0), (0, -1))
    assert iv.lower == pytest.approx(-0.338, abs=0.08) and iv.upper == pytest.approx(-0.168, abs=0.08)


@pytest.mark.parametrize("seed", range(6))
def test_sample_sandwich(seed):
    name = ("scm-a", "example-3", "scm-b")[seed % 3]
    t = simulate(preset(name), 500, 100 + seed)
    cfg = IntegrationConfig(seed=seed, n_joint=50_000)
    for m in (1, 2, 3, 4):
        ident, lo, hi = moment_profile(t, m, (1, 0), cfg)
        assert lo.value - 3 * lo.stderr <= ident.value <= hi.value + 3 * hi.stderr
    if -1 in t.arms:
        ident, lo, hi = product_profile(t, (1, 0), (0, -1), cfg)
        assert lo.value - 3 * lo.stderr <= ident.value <= hi.value + 3 * hi.stderr


def test_shape_bounds_contain_point_values():
    t = simulate(preset("example-3"), 1000, 8)
    cfg = IntegrationConfig(seed=2, n_joint=200_000)
    stats = derived_stats(t, (1, 0), cfg)
    skew = skewness_bounds(t, (1, 0), cfg)
    kurt = kurtosis_bounds(t, (1, 0), cfg)
    assert skew.lower <= stats.skewness <= skew.upper
    assert kurt.lower <= stats.kurtosis <= kurt.upper


def test_correlation_bounds_are_a_unit_subinterval():
    t = simulate(preset("example-3"), 1000, 9)
    cfg = IntegrationConfig(seed=2, n_joint=50_000)
    iv = correlation_bounds(t, (1, 0), (0, -1), cfg)
    assert -1.0 <= iv.lower <= iv.upper <= 1.0
    assert iv.contains(correlation_identified(t, (1, 0), (0, -1), cfg).value, slack=0.02)


def test_centered_bounds_on_homogeneous_effect_collapse():
    t = simulate(preset("example-1"), 2000, 1)
    iv = moment_bounds(t, 2, (1, 0), centered=True)
    assert iv.upper < 0.05
