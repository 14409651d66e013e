"""Bayesian confidence that events come from the main hypothesis.

With equal priors, after k events the odds are chi_k = prod p_main/p_alt
and the confidence is chi_k / (1 + chi_k). Everything is accumulated in
log space and saturated at +-700 nats.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np
from scipy.special import expit

from .base import BaseValidator, HypothesisPair, log_ratio

SATURATION = 700.0
CONFIDENCE_TARGET = 0.99


class BayesValidator(BaseValidator):
    pass_threshold = CONFIDENCE_TARGET

    def __init__(self, hypotheses: HypothesisPair):
        super().__init__(test="bayes")
        self.hypotheses = hypotheses

    def step(self, configuration: Sequence[int]) -> float:
        return log_ratio(
            self.hypotheses.p_main.probability_of(configuration),
            self.hypotheses.p_alt.probability_of(configuration),
        )

    def accumulate(self, steps: np.ndarray) -> np.ndarray:
        log_odds = np.empty_like(steps)
        running = 0.0
        for i, value in enumerate(steps):
            running = float(np.clip(running + np.clip(value, -SATURATION, SATURATION), -SATURATION, SATURATION))
            log_odds[i] = running
        return expit(log_odds)

    def passes(self, final: float) -> bool:
        return final >= self.pass_threshold


def bayes_confidence(events, hypotheses: HypothesisPair):
    return BayesValidator(hypotheses).run(events)
