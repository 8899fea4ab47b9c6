"""Shared fixtures: the expensive staircase-norm builds happen once."""

import numpy as np
import pytest

from normproj import cantor


@pytest.fixture(scope="session")
def triadic_set():
    return cantor.CantorSet()


@pytest.fixture(scope="session")
def curve10(triadic_set):
    return cantor.curve_samples(triadic_set, 10)


@pytest.fixture(scope="session")
def curve12(triadic_set):
    return cantor.curve_samples(triadic_set, 12)


@pytest.fixture(scope="session")
def ce_norm(curve10):
    return cantor.build_norm(curve10)


@pytest.fixture()
def rng():
    return np.random.default_rng(0x5EED)
