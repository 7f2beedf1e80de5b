"""
Shared fixtures: a 25 GHz carrier and the preset stacks built on it
"""

import numpy as np
import pytest

from risdcc.core.geometry import (
    CarrierSpec,
    evenly_spaced_stack,
    preset_74,
    preset_repetition_42,
    preset_systematic_42,
)


@pytest.fixture
def carrier():
    return CarrierSpec(25e9)


@pytest.fixture
def wl(carrier):
    return carrier.wavelength_m


@pytest.fixture
def repetition_stack(carrier, wl):
    return preset_repetition_42(carrier, a=0.4 * wl, h=0.2 * wl, dz=10 * wl)


@pytest.fixture
def systematic_stack(carrier, wl):
    return preset_systematic_42(carrier, d=0.4 * wl, dz=10 * wl)


@pytest.fixture
def stack_74(carrier, wl):
    return preset_74(carrier, "evenly_spaced", pitch=0.4 * wl, dz=10 * wl)


@pytest.fixture
def trellis_stack(carrier, wl):
    """Two inputs, two outputs; a valid stack only without the expansion check"""
    return evenly_spaced_stack(carrier, 2, 2, 0.4 * wl, 10 * wl, require_expansion=False)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
