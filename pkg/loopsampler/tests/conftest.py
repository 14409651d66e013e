"""Shared fixtures: small textbook networks and Haar-typical instances."""

import numpy as np
import pytest

from loopsampler.linalg import UnitaryMatrix, haar_random_unitary
from loopsampler.sampling import SamplingInstance


@pytest.fixture
def beam_splitter():
    """50:50 coupler in the Hadamard convention."""
    return UnitaryMatrix(np.array([[1, 1], [1, -1]]) / np.sqrt(2))


@pytest.fixture
def hom_instance(beam_splitter):
    return SamplingInstance(beam_splitter, (1, 1))


@pytest.fixture
def haar_instance():
    """Three photons in the first three of six Haar-random modes."""
    return SamplingInstance(haar_random_unitary(6, seed=11), (1, 1, 1, 0, 0, 0))
