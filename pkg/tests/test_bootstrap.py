import numpy as np
import pytest

from causal_moments import ObservationTable, ate
from causal_moments.bootstrap import (BootstrapConfig, bootstrap_ci, bootstrap_replicates, nearest_rank,
                                      percentile_interval, resample_rows)
from causal_moments.data import conditional_mean
from causal_moments.errors import BootstrapFailure, ConfigError, NoDataError, QualityWarning
from causal_moments.quadrature import rng_stream
from causal_moments.synthetic import preset, simulate


@pytest.fixture(scope="module")
def small():
    return simulate(preset("scm-a"), 100, 2)


def test_constant_estimator(small):
    res = bootstrap_ci(lambda t, s: 7.0, small, BootstrapConfig(replicates=30))
    mean, lower, upper, values = res
    assert (mean, lower, upper) == (7.0, 7.0, 7.0) and len(values) == 30


def test_determinism(small):
    cfg = BootstrapConfig(replicates=40, seed=5)
    est = lambda t, s: ate(t, (1, 0))
    assert bootstrap_ci(est, small, cfg) == bootstrap_ci(est, small, cfg)
    assert bootstrap_ci(est, small, cfg) != bootstrap_ci(est, small, BootstrapConfig(replicates=40, seed=6))


def test_interval_endpoints_are_order_statistics(small):
    res = bootstrap_ci(lambda t, s: ate(t, (1, 0)), small, BootstrapConfig(replicates=200, level=0.9))
    ordered = sorted(res.replicate_values)
    assert res.lower == ordered[9] and res.upper == ordered[189]
    assert res.lower <= res.upper


def test_nearest_rank_convention():
    v = np.arange(1.0, 1001.0)
    assert nearest_rank(v, 0.025) == 25.0 and nearest_rank(v, 0.975) == 975.0
    assert nearest_rank(v, 0.0) == 1.0 and nearest_rank(v, 1.0) == 1000.0
    lo, hi = percentile_interval(np.column_stack([v, -v]), 0.95)
    assert lo.tolist() == [25.0, -976.0] and hi.tolist() == [975.0, -26.0]


def test_each_replicate_gets_its_own_mc_seed(small):
    seeds = []
    bootstrap_replicates(lambda t, s: seeds.append(s) or 0.0, small, BootstrapConfig(replicates=10))
    assert len(set(seeds)) == 10


def test_centering_is_recomputed_per_replicate(small):
    means = []
    bootstrap_replicates(lambda t, s: 0.0, small, BootstrapConfig(replicates=20),
                         on_replicate=lambda b, t: means.append(conditional_mean(t, 1)))
    assert len(set(means)) > 1
    assert conditional_mean(small, 1) not in means[:1] or len(set(means)) > 1


def test_within_arm_keeps_arm_sizes(small):
    rows = resample_rows(small, rng_stream(0, 1), "within-arm")
    resampled = small.take(rows)
    for arm in small.arms:
        assert (resampled.x == arm).sum() == (small.x == arm).sum()


def test_failure_counting_and_warning():
    t = ObservationTable([0] * 3 + [1], [0.0, 1.0, 2.0, 3.0])

    def needs_arm_1(sample, seed):
        if 1 not in sample.arms:
            raise NoDataError("arm 1 missing")
        return 1.0

    with pytest.warns(QualityWarning):
        values, failures = bootstrap_replicates(needs_arm_1, t, BootstrapConfig(replicates=100))
    assert failures > 20 and len(values) == 100 - failures


def test_all_failures_raise(small):
    def broken(sample, seed):
        raise NoDataError("nope")

    with pytest.raises(BootstrapFailure):
        bootstrap_ci(broken, small, BootstrapConfig(replicates=5))


@pytest.mark.parametrize("kwargs", [dict(replicates=1), dict(level=1.0), dict(level=0.0),
                                    dict(resample_mode="strata"), dict(seed=-1)])
def test_config_validation(kwargs):
    with pytest.raises(ConfigError):
        BootstrapConfig(**kwargs)


def test_threaded_replicates_are_identical(small, monkeypatch):
    monkeypatch.setenv("CAUSAL_MOMENTS_THREADS", "3")
    est = lambda t, s: ate(t, (1, 0))
    a = bootstrap_ci(est, small, BootstrapConfig(replicates=30))
    b = bootstrap_ci(est, small, BootstrapConfig(replicates=30, workers=3))
    assert a == b
