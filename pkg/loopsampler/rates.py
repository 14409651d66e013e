"""n-fold coincidence rate from an independent-efficiency budget.

The model is purely multiplicative: every photon independently survives
the source, each loop circulation and the detector, and one trial runs per
experiment period. There is no multi-photon pile-up and no post-selection
combinatorics, so absolute numbers are order-of-magnitude estimates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, List, NamedTuple, Optional

from .errors import DomainError
from .log import get_logger

logger = get_logger(__name__)

SECONDS_PER_HOUR = 3600.0


@dataclass(frozen=True)
class EfficiencyBudget:
    rep_rate: float = 76.4e6
    source_eff: float = 0.139
    loop_transmission: float = 0.834
    detector_eff: float = 0.33
    n_loops: int = 5
    bins_per_trial: int = 10
    # circulations spent injecting and ejecting the bins
    overhead_loops: int = 2
    trial_period_slots: Optional[int] = None

    def __post_init__(self):
        if self.rep_rate <= 0:
            raise DomainError("repetition rate must be positive")
        for name in ("source_eff", "loop_transmission", "detector_eff"):
            value = getattr(self, name)
            if not 0.0 < value <= 1.0:
                raise DomainError(f"{name} must lie in (0, 1], got {value}")
        if self.n_loops < 0 or self.bins_per_trial < 1 or self.overhead_loops < 0:
            raise DomainError("loops, bins per trial and overhead must be non-negative counts")
        if self.trial_period_slots is not None and self.trial_period_slots < 1:
            raise DomainError("trial period must be at least one slot")

    @property
    def period_slots(self) -> int:
        if self.trial_period_slots is not None:
            return self.trial_period_slots
        return self.bins_per_trial * (self.n_loops + self.overhead_loops)

    @property
    def trial_rate(self) -> float:
        return self.rep_rate / self.period_slots

    @property
    def eta_total(self) -> float:
        return self.source_eff * self.loop_transmission ** self.n_loops * self.detector_eff


class RateRow(NamedTuple):
    n: int
    per_second: float
    per_hour: float


def current_budget() -> EfficiencyBudget:
    return EfficiencyBudget()


def projected_budget() -> EfficiencyBudget:
    """Improved source and detectors, 20 bins circulated 20 times."""
    return EfficiencyBudget(
        source_eff=0.6,
        loop_transmission=0.99,
        detector_eff=0.95,
        n_loops=20,
        bins_per_trial=20,
    )


def n_fold_rate(budget: EfficiencyBudget, n: int) -> float:
    """Events per second with all n photons detected."""
    if n < 1:
        raise DomainError(f"photon number must be at least 1, got {n}")
    return budget.trial_rate * budget.eta_total ** n


def compare_rates(budget_a: EfficiencyBudget, budget_b: EfficiencyBudget, n: int) -> float:
    return n_fold_rate(budget_a, n) / n_fold_rate(budget_b, n)


def rate_table(budget: EfficiencyBudget, ns: Iterable[int]) -> List[RateRow]:
    rows = []
    for n in ns:
        rate = n_fold_rate(budget, n)
        rows.append(RateRow(n, rate, rate * SECONDS_PER_HOUR))
    return rows


def required_loop_transmission(budget: EfficiencyBudget, n: int, target_per_hour: float) -> float:
    """Per-loop transmission that makes the n-fold rate hit `target_per_hour`.

    Values above 1 mean the target is out of reach with the other efficiencies.
    """
    if target_per_hour <= 0:
        raise DomainError("target rate must be positive")
    if budget.n_loops == 0:
        raise DomainError("loop transmission is irrelevant with zero loops")
    eta_needed = (target_per_hour / SECONDS_PER_HOUR / budget.trial_rate) ** (1.0 / n)
    value = (eta_needed / (budget.source_eff * budget.detector_eff)) ** (1.0 / budget.n_loops)
    if value > 1.0:
        logger.warning("target %.3g/hour needs loop transmission %.4f > 1", target_per_hour, value)
    return value


def with_loop_transmission(budget: EfficiencyBudget, value: float) -> EfficiencyBudget:
    return replace(budget, loop_transmission=value)


def log_rate(budget: EfficiencyBudget, n: int) -> float:
    return math.log(budget.trial_rate) + n * math.log(budget.eta_total)
