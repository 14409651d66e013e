"""Likelihood-ratio counter against a distinguishable-particle sampler."""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .base import BaseValidator, HypothesisPair, log_ratio


class LikelihoodRatioValidator(BaseValidator):
    def __init__(self, p_ind, p_dist):
        super().__init__(test="lr")
        self.hypotheses = HypothesisPair(p_ind, p_dist)

    def step(self, configuration: Sequence[int]) -> float:
        ratio = log_ratio(
            self.hypotheses.p_main.probability_of(configuration),
            self.hypotheses.p_alt.probability_of(configuration),
        )
        return float(np.sign(ratio))


def lr_counter(events, p_ind, p_dist):
    return LikelihoodRatioValidator(p_ind, p_dist).run(events)
