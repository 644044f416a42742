from __future__ import annotations

import numpy as np
import pytest

from helpers import identity_meta, square_fixture


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260823)


@pytest.fixture
def square_meta():
    return square_fixture()[0]


@pytest.fixture
def square_set():
    return square_fixture()[1]


@pytest.fixture
def meta_8_4_4():
    return identity_meta(8, 4, 4)
