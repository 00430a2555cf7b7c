from functools import lru_cache

import numpy as np
import pytest

from voronoiperc import (
    Configuration,
    Rect,
    Tessellation,
    build_tessellation,
    sample_binomial,
)

UNIT = Rect(rho=1.0, area=1.0)


@lru_cache(maxsize=512)
def tess_cached(n: int, seed: int, rho: float = 1.0, area: float = 1.0) -> Tessellation:
    return build_tessellation(sample_binomial(Rect(rho=rho, area=area), n, seed))


def user_tess(points, window=UNIT) -> Tessellation:
    return build_tessellation(Configuration(points=np.asarray(points, dtype=float), window=window))


@pytest.fixture
def unit_window() -> Rect:
    return UNIT


@pytest.fixture
def two_cells_vertical() -> Tessellation:
    # bisector x = 0: left and right half-cells; red LR crossing needs both red
    return user_tess([[-0.25, 0.0], [0.25, 0.0]])


@pytest.fixture
def two_cells_horizontal() -> Tessellation:
    # bisector y = 0: either full-width cell crosses alone
    return user_tess([[0.0, -0.25], [0.0, 0.25]])


@pytest.fixture
def single_cell() -> Tessellation:
    return user_tess([[0.1, -0.05]])
