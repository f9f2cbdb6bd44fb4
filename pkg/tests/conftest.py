import pytest

from causal_moments import IntegrationConfig
from causal_moments.synthetic import preset, simulate


@pytest.fixture
def fast():
    """Cheap Monte Carlo settings for unit tests."""
    return IntegrationConfig(n_joint=20_000, seed=11)


@pytest.fixture(scope="session")
def scm_a_table():
    return simulate(preset("scm-a"), 1000, 5)


@pytest.fixture(scope="session")
def scm_b_table():
    return simulate(preset("scm-b"), 1000, 5)
