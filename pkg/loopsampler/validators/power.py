"""Exact power of the +-1 counters, without Monte Carlo.

A counter that steps +1, 0 or -1 per i.i.d. event has a final value whose
distribution is the k-fold convolution of the single-step distribution.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from ..errors import DomainError
from ..sampling import Distribution
from .base import BaseValidator


class StepProbabilities(NamedTuple):
    plus: float
    zero: float
    minus: float


def exact_sign_probabilities(validator: BaseValidator, source: Distribution) -> StepProbabilities:
    """Probability of each counter step when events are drawn from `source`."""
    plus = zero = minus = 0.0
    for configuration, p in zip(source.configurations, source.probabilities):
        if p == 0.0:
            continue
        step = validator.step(configuration)
        if step > 0:
            plus += p
        elif step < 0:
            minus += p
        else:
            zero += p
    return StepProbabilities(plus, zero, minus)


def final_counter_distribution(steps: StepProbabilities, events: int) -> np.ndarray:
    """P(counter = c) for c = -events..events, index c + events."""
    if events < 0:
        raise DomainError("event count must be non-negative")
    kernel = np.array([steps.minus, steps.zero, steps.plus])
    result = np.array([1.0])
    for _ in range(events):
        result = np.convolve(result, kernel)
    return result


def probability_positive(steps: StepProbabilities, events: int) -> float:
    dist = final_counter_distribution(steps, events)
    return float(dist[events + 1 :].sum())


def probability_negative(steps: StepProbabilities, events: int) -> float:
    dist = final_counter_distribution(steps, events)
    return float(dist[:events].sum())
