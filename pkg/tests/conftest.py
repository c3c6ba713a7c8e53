from __future__ import annotations

import numpy as np
import pytest

from acekit.core.models import Dataset, Regime
from acekit.core.rng import SeededRng
from acekit.simgen import generate, scenario


@pytest.fixture
def rng() -> SeededRng:
    return SeededRng(12345)


@pytest.fixture
def fig5_model():
    return scenario("fig5").model


@pytest.fixture
def fig10_model():
    return scenario("fig10").model


@pytest.fixture
def fig10_data(fig10_model) -> Dataset:
    return generate(fig10_model, 500, Regime.OBSERVATIONAL, SeededRng(7))


@pytest.fixture
def small_data() -> Dataset:
    """Eight units, one covariate, response exactly 1 + 2 T + 3 X."""
    x = np.array([0.1, -0.4, 0.9, 1.3, -1.1, 0.2, 0.7, -0.6])
    t = np.array([0, 0, 0, 1, 1, 1, 1, 0])
    return Dataset(x=x, t=t, y=1.0 + 2.0 * t + 3.0 * x)
