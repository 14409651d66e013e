"""Base validator interface and the shared result types."""
from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Dict, Iterable, Sequence

import numpy as np

from ..errors import DomainError
from ..sampling import Distribution, EventLog


@dataclass(frozen=True, eq=False)
class CounterTrajectory:
    """Running statistic after each processed event."""

    values: np.ndarray
    test: str

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def final(self) -> float | None:
        return float(self.values[-1]) if len(self.values) else None


@dataclass(frozen=True)
class HypothesisPair:
    p_main: Distribution
    p_alt: Distribution

    def __post_init__(self):
        if not self.p_main.same_support(self.p_alt):
            raise DomainError("hypotheses must share one configuration list")


@dataclass(frozen=True)
class Verdict:
    test: str
    final: float | None
    events: int
    passed: bool

    def __str__(self) -> str:
        label = "PASS" if self.passed else "FAIL"
        if self.final is None:
            final = "none"
        elif self.test == "bayes":
            final = f"{self.final:.4f}"
        else:
            final = f"{int(self.final):+d}"
        return f"{label} test={self.test} final={final} events={self.events}"


class BaseValidator(ABC):
    """
    Abstract base class for event-stream validators.

    Each validator is responsible for:
    1. Scoring a single output configuration (`step`)
    2. Folding the scores into a running statistic (`accumulate`)
    3. Deciding whether the final statistic supports the boson-sampler hypothesis
    """

    pass_threshold: float = 0.0

    def __init__(self, test: str):
        self.test = test

    @abstractmethod
    def step(self, configuration: Sequence[int]) -> float:
        """
        Score one event.

        Args:
            configuration: Output occupation vector of the event

        Returns:
            The increment this event contributes to the running statistic
        """

    def accumulate(self, steps: np.ndarray) -> np.ndarray:
        return np.cumsum(steps)

    def run(self, events: EventLog | Iterable[Sequence[int]]) -> CounterTrajectory:
        steps = np.array([self.step(event) for event in events], dtype=float)
        if steps.size == 0:
            return CounterTrajectory(np.zeros(0), self.test)
        return CounterTrajectory(self.accumulate(steps), self.test)

    def passes(self, final: float) -> bool:
        return final > self.pass_threshold

    def verdict(self, trajectory: CounterTrajectory) -> Verdict:
        final = trajectory.final
        passed = final is not None and self.passes(final)
        return Verdict(self.test, final, len(trajectory), passed)

    def get_validator_info(self) -> Dict[str, Any]:
        """Return metadata about this validator."""
        return {
            "test": self.test,
            "validator_type": self.__class__.__name__,
            "pass_threshold": self.pass_threshold,
        }


def log_ratio(p_main: float, p_alt: float) -> float:
    """log(p_main / p_alt) with +-inf when exactly one side vanishes."""
    if p_main == 0.0 and p_alt == 0.0:
        raise DomainError("event has zero probability under both hypotheses")
    if p_alt == 0.0:
        return float("inf")
    if p_main == 0.0:
        return float("-inf")
    return float(np.log(p_main) - np.log(p_alt))
