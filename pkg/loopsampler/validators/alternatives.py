"""Alternative hypotheses a boson sampler is tested against."""
from __future__ import annotations

from typing import Optional, Tuple

import numpy as np

from ..errors import DomainError
from ..sampling import Distribution, SamplingInstance, enumerate_output_configurations, output_distribution, uniform_distribution

ALTERNATIVES: Tuple[str, ...] = ("uniform", "distinguishable", "gaussian")


def gaussian_distribution(m: int, n: int, center: Optional[float] = None, width: Optional[float] = None) -> Distribution:
    """Discretized bell profile over the lexicographic configuration index.

    Defaults: center at the middle index, width of one sixth of the support.
    """
    configurations = enumerate_output_configurations(m, n)
    size = len(configurations)
    center = (size - 1) / 2.0 if center is None else float(center)
    width = size / 6.0 if width is None else float(width)
    if width <= 0:
        raise DomainError("gaussian width must be positive")
    index = np.arange(size)
    weights = np.exp(-0.5 * ((index - center) / width) ** 2)
    if weights.sum() == 0.0:
        raise DomainError("gaussian profile has no weight on the support")
    return Distribution(tuple(configurations), weights / weights.sum(), "gaussian")


def make_alternative(kind: str, instance: SamplingInstance, **params) -> Distribution:
    if kind == "uniform":
        return uniform_distribution(instance.m, instance.n)
    if kind == "distinguishable":
        return output_distribution(instance, "distinguishable")
    if kind == "gaussian":
        return gaussian_distribution(instance.m, instance.n, params.get("center"), params.get("width"))
    raise DomainError(f"unknown alternative hypothesis: {kind}")
