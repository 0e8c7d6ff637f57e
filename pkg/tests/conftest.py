import numpy as np
import pytest

from circthermo import (Discretization, doubling, linear_map,
                        manneville_pomeau, perturbed_doubling,
                        translated_doubling, zero_potential)


@pytest.fixture(scope="session")
def doubling_map():
    return doubling()


@pytest.fixture(scope="session")
def pot_zero():
    return zero_potential()


@pytest.fixture(scope="session")
def disc_fourier():
    return Discretization(n=64, scheme="collocation", interpolation="fourier")


@pytest.fixture(scope="session")
def disc_linear():
    return Discretization(n=256, scheme="collocation", interpolation="linear")


def builtin_maps():
    """One representative per builtin family."""
    return [doubling(), linear_map(3), manneville_pomeau(1.0),
            perturbed_doubling(0.1), translated_doubling(0.3)]


def cos1(x):
    return np.cos(2 * np.pi * np.asarray(x, dtype=float))
