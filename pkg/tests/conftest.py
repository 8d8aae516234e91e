"""Shared fixtures."""

import numpy as np
import pytest

from frenet_kit.models.geometry import FlagSimplex, Frame, Simplex


@pytest.fixture
def rng():
    return np.random.default_rng(20240531)


@pytest.fixture
def unit_triangle():
    return Simplex.of([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])


@pytest.fixture
def unit_flag():
    return FlagSimplex(base=[0.0, 0.0], frame=Frame.of([[1.0, 0.0], [0.0, 1.0]]), scales=[1.0, 1.0])
