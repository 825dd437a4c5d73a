import numpy as np
import pytest

from symqa.hamiltonians import random_xxz_chain, table1_couplings


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def xxz4():
    return random_xxz_chain(table1_couplings()[:3], 0.7)


def random_density(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho)
