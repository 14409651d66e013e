"""Row-norm test against a uniform sampler.

Events whose scattering submatrix has large row norms are favoured by a
genuine boson sampler; the (m/n)-scaled product of row norms has unit
expectation for Haar-typical rows, so 1 separates the two hypotheses.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from ..linalg import as_configuration, scattering_submatrix
from .base import BaseValidator

# Ties at R = 1 (to within TIE_TOL) count against the data
THRESHOLD = 1.0
TIE_TOL = 1e-12


def row_norm_statistic(unitary, inputs: Sequence[int], outputs: Sequence[int]) -> float:
    u = np.asarray(unitary)
    m = u.shape[0]
    n = sum(as_configuration(inputs, m))
    sub = scattering_submatrix(u, inputs, outputs)
    row_norms = np.sum(np.abs(sub) ** 2, axis=1)
    return float(np.prod((m / n) * row_norms))


class RowNormValidator(BaseValidator):
    def __init__(self, unitary, inputs: Sequence[int]):
        super().__init__(test="aa")
        self.unitary = np.asarray(unitary)
        self.inputs = as_configuration(inputs, self.unitary.shape[0])

    def step(self, configuration: Sequence[int]) -> float:
        r = row_norm_statistic(self.unitary, self.inputs, configuration)
        return 1.0 if r > THRESHOLD + TIE_TOL else -1.0


def aa_counter(unitary, inputs: Sequence[int], events):
    return RowNormValidator(unitary, inputs).run(events)
