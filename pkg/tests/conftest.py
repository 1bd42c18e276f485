from __future__ import annotations

import pytest

from tests.builders import (
    annulus_document,
    band_document,
    double_well_document,
    pair_for,
    solid_torus_document,
)
from wellcap.problem import parse_problem


@pytest.fixture
def band():
    return parse_problem(band_document())


@pytest.fixture
def band_no_sides():
    return parse_problem(band_document(with_sides=False))


@pytest.fixture
def annulus():
    return parse_problem(annulus_document())


@pytest.fixture
def solid_torus():
    return parse_problem(solid_torus_document())


@pytest.fixture
def double_well():
    return parse_problem(double_well_document())


@pytest.fixture
def band_pair(band):
    return pair_for(band)
