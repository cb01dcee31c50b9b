import math

import pytest

from rydbell.pair import build_pair_basis, default_channels
from rydbell.species import get_species
from rydbell.structure import hydrogenic_species

OMEGA85 = 2.0 * math.pi * 0.6e6
OMEGA87 = 2.0 * math.pi * 0.659e6


@pytest.fixture(scope="session")
def hydrogen():
    return hydrogenic_species()


@pytest.fixture(scope="session")
def rb87():
    return get_species("Rb87")


@pytest.fixture(scope="session")
def rb85():
    return get_species("Rb85")


@pytest.fixture(scope="session")
def default_basis(rb87, rb85):
    """Default 260-state basis; session scoped, the radial cache is shared."""
    return build_pair_basis(default_channels(), rb87, rb85)
