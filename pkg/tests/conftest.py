import numpy as np
import pytest

from lvpoisson import delta_system, integrable_5d, predator_prey_2d


@pytest.fixture(scope="session")
def sys5():
    return integrable_5d()


@pytest.fixture(scope="session")
def sysd():
    return delta_system(1e-2)


@pytest.fixture(scope="session")
def sys2():
    return predator_prey_2d()


@pytest.fixture(scope="session")
def corpus(sys5, sysd, sys2):
    return {"integrable-5d": sys5, "delta-system": sysd, "predator-prey-2d": sys2}


@pytest.fixture()
def rng():
    return np.random.default_rng(20240811)
