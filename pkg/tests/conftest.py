import numpy as np
import pytest

import radialmp as rm


@pytest.fixture(scope="session")
def ex1_pots():
    """min/max power potentials with a0=2, ainf=3/2."""
    A = rm.PotentialSpec.min_power(1, 2, 1, 1.5, declared_a0=2.0, declared_ainf=1.5)
    V = rm.PotentialSpec.min_power(1, 0, 1, -0.5)
    K = rm.PotentialSpec.max_power(1, 0.5, 1, 1.5)
    return A, V, K


@pytest.fixture(scope="session")
def ex2_pots():
    """inverse-power potentials with a0=-3, ainf=-2 (needs N >= 6)."""
    A = rm.PotentialSpec.max_power(1, -2, 1, -3, declared_a0=-3.0, declared_ainf=-2.0)
    V = rm.PotentialSpec.pure_power(1, -4)
    K = rm.PotentialSpec.min_power(1, 0, 1, -2)
    return A, V, K


@pytest.fixture(scope="session")
def ex3_pots():
    """exponential V, K handled through the beta=1/2 ratio bound."""
    A = rm.PotentialSpec.max_power(1, -2, 1, -3, declared_a0=-3.0, declared_ainf=-2.0)
    V = rm.PotentialSpec.exp_scaled(1, 2)
    K = rm.PotentialSpec.exp_scaled(1, 1)
    return A, V, K


@pytest.fixture(scope="session")
def ex2_params():
    return rm.ProblemParams(
        N=6, a0=-3, ainf=-2, alpha0=0, alphainf=-2, beta0=0, betainf=0
    )


@pytest.fixture(scope="session")
def grid6():
    return rm.build_grid(6, 1e-6, 1e3, 800)


@pytest.fixture(scope="session")
def grid3():
    return rm.build_grid(3, 1e-6, 1e3, 800)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
