import numpy as np
import pytest

from causal_moments import IntegrationConfig, moment_identified
from causal_moments.errors import ValidationError
from causal_moments.synthetic import (DiscreteScm, FiniteNoise, GROUND_TRUTH, PopulationCdf, ScmSpec, UniformNoise,
                                      discretized_example, example_corpus, exact_identified_value, exact_moment,
                                      exact_product_moment, monotone_corpus, preset, simulate, unrestricted_corpus)


def test_scm_a_outcome_range_and_arm_frequency():
    t = simulate(preset("scm-a"), 10_000, 1)
    assert t.y.min() >= -2.0 and t.y.max() <= 1.0
    assert abs((t.x == 1).mean() - 0.8) < 0.02


def test_scm_b_outcome_range_and_zero_arm():
    t = simulate(preset("scm-b"), 3000, 2)
    assert t.y.min() >= 0.0 and t.y.max() <= 1.0
    assert np.all(t.outcomes(0) == 0.0)


def test_simulate_is_seed_deterministic():
    a, b = simulate(preset("scm-b"), 500, 4), simulate(preset("scm-b"), 500, 4)
    assert np.array_equal(a.x, b.x) and np.array_equal(a.y, b.y)
    c = simulate(preset("scm-b"), 500, 5)
    assert not np.array_equal(a.y, c.y)


def test_invalid_specs():
    with pytest.raises(ValidationError):
        ScmSpec("bad", {0: 0.5, 1: 0.6}, UniformNoise(0, 1), lambda x, u: u)
    with pytest.raises(ValidationError):
        UniformNoise(1.0, 1.0)
    with pytest.raises(ValidationError):
        FiniteNoise((0.0, 1.0), (0.5, 0.4))
    with pytest.raises(ValidationError):
        simulate(preset("scm-a"), 0, 1)
    with pytest.raises(ValidationError):
        preset("scm-z")


def test_discrete_scm_simulation_uses_outcome_table():
    scm = DiscreteScm("t", {0: 0.5, 1: 0.5}, np.array([1.0, 0.0]), np.array([0.25, 0.75]),
                      {0: np.array([10.0, 20.0]), 1: np.array([30.0, 40.0])})
    # support is sorted on construction, outcomes follow
    assert scm.support.tolist() == [0.0, 1.0] and scm.outcomes[0].tolist() == [20.0, 10.0]
    t = simulate(scm, 400, 0)
    assert set(t.outcomes(0).tolist()) <= {10.0, 20.0} and set(t.outcomes(1).tolist()) <= {30.0, 40.0}


def test_population_cdf_is_strict():
    F = PopulationCdf.from_atoms([0.0, 1.0, 1.0], [0.2, 0.3, 0.5])
    assert F(np.array([0.0, 0.5, 1.0, 1.5])).tolist() == [0.0, 0.2, 0.2, 1.0]


# hand-enumerated values for small discrete SCMs

def test_exact_moment_homogeneous_effect():
    e1 = discretized_example("example-1", support=(-1.0, 0.0, 1.0))
    for m in range(1, 6):
        assert exact_moment(e1, (1, 0), m) == pytest.approx(1.0, abs=1e-15)
    assert exact_product_moment(e1, (1, 0), (0, -1)) == pytest.approx(1.0, abs=1e-15)
    assert exact_product_moment(e1, (1, 0), (0, -1), centered=True) == pytest.approx(0.0, abs=1e-15)


def test_exact_moment_example_2_centered_variance():
    e2 = discretized_example("example-2")
    assert exact_moment(e2, (1, 0), 2, centered=True) == pytest.approx(1 / 6, abs=1e-15)
    assert exact_moment(e2, (1, 0), 1, centered=True) == pytest.approx(0.0, abs=1e-15)


def test_exact_product_example_3():
    e3 = discretized_example("example-3")
    assert exact_product_moment(e3, (1, 0), (0, -1)) == pytest.approx(-7 / 6, abs=1e-15)


def test_identification_oracle_on_fine_scm_a():
    k = 1000
    support = tuple(np.linspace(-1.0, 1.0, 2 * k + 1))
    scm = discretized_example("scm-a", support=support)
    value = exact_identified_value(scm, "moment", (1, 0), m=2)
    assert value == pytest.approx(exact_moment(scm, (1, 0), 2), abs=1e-9)
    assert abs(value - 1 / 3) < 1e-3


def test_first_order_oracle_is_the_ace():
    for scm in monotone_corpus(seed=3, size=5) + unrestricted_corpus(seed=3, size=5):
        ace = scm.arm_mean(1) - scm.arm_mean(0)
        assert exact_identified_value(scm, "moment", (1, 0), m=1) == pytest.approx(ace, abs=1e-9)


MONOTONE_EXAMPLES = [s for s in example_corpus() if s.is_monotone()]


def test_example_monotonicity_flags():
    flags = {s.name: s.is_monotone() for s in example_corpus()}
    # arm -1 of example 2 responds as -U while arm 1 responds as +U
    assert flags == {"example-1-discrete": True, "example-2-discrete": False, "example-3-discrete": True,
                     "scm-a-discrete": True}


def test_non_monotone_example_2_misidentifies_the_product():
    e2 = discretized_example("example-2")
    ident = exact_identified_value(e2, "central_product", (1, 0), arms_right=(0, -1))
    assert exact_product_moment(e2, (1, 0), (0, -1), centered=True) == pytest.approx(1 / 6)
    assert ident == pytest.approx(-1 / 6)


@pytest.mark.parametrize("scm", monotone_corpus() + MONOTONE_EXAMPLES, ids=lambda s: s.name)
def test_oracle_agreement_on_monotone_scms(scm):
    assert scm.is_monotone()
    for m in (1, 2, 3, 4):
        for centered, formula in ((False, "moment"), (True, "central_moment")):
            assert exact_identified_value(scm, formula, (1, 0), m=m) == pytest.approx(
                exact_moment(scm, (1, 0), m, centered), abs=1e-9)
    if -1 not in scm.arms:
        return
    for centered, formula in ((False, "product"), (True, "central_product")):
        assert exact_identified_value(scm, formula, (1, 0), arms_right=(0, -1)) == pytest.approx(
            exact_product_moment(scm, (1, 0), (0, -1), centered), abs=1e-9)


@pytest.mark.parametrize("scm", monotone_corpus() + unrestricted_corpus(), ids=lambda s: s.name)
def test_exact_bounds_contain_target(scm):
    for m in (1, 2, 3, 4):
        for centered, formula in ((False, "moment_bounds"), (True, "central_moment_bounds")):
            lo, hi = exact_identified_value(scm, formula, (1, 0), m=m)
            target = exact_moment(scm, (1, 0), m, centered)
            assert lo - 1e-9 <= target <= hi + 1e-9
    for centered, formula in ((False, "product_bounds"), (True, "central_product_bounds")):
        lo, hi = exact_identified_value(scm, formula, (1, 0), arms_right=(0, -1))
        assert lo - 1e-9 <= exact_product_moment(scm, (1, 0), (0, -1), centered) <= hi + 1e-9


def test_monotonicity_matters():
    # the identification formula is wrong for at least some non-monotone responses
    gaps = [abs(exact_identified_value(s, "moment", (1, 0), m=2) - exact_moment(s, (1, 0), 2))
            for s in unrestricted_corpus()]
    assert max(gaps) > 1e-3


def test_unknown_formula():
    with pytest.raises(ValidationError):
        exact_identified_value(monotone_corpus(size=1)[0], "skew", (1, 0), m=2)


def test_ground_truth_constants():
    truth = GROUND_TRUTH["scm-a"]
    assert (truth["moment_2"], truth["moment_3"], truth["moment_4"]) == (1 / 3, -1 / 4, 1 / 5)
    assert GROUND_TRUTH["scm-b"]["product_1,0;0,-1"] == -1 / 3


def test_estimator_error_shrinks_with_sample_size():
    cfg = IntegrationConfig(n_joint=20_000)
    medians = []
    for n in (20, 100, 1000):
        errors = []
        for rep in range(100):
            t = simulate(preset("scm-b"), n, 10_000 + rep)
            try:
                est = moment_identified(t, 2, (1, 0), cfg.with_seed(rep)).value
            except Exception:
                continue
            errors.append(abs(est - 1 / 3))
        medians.append(np.median(errors))
    assert medians[2] < medians[1] < medians[0]
