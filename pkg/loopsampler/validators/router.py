"""Validator routing: maps test identifiers onto configured validators."""
from __future__ import annotations

from typing import Any, Callable, Dict, Optional, Tuple

from ..errors import DomainError
from ..log import get_logger
from ..sampling import Distribution, EventLog, SamplingInstance, output_distribution
from .alternatives import ALTERNATIVES, make_alternative
from .base import BaseValidator, CounterTrajectory, HypothesisPair, Verdict
from .bayes import BayesValidator
from .likelihood import LikelihoodRatioValidator
from .row_norm import RowNormValidator

logger = get_logger(__name__)

DEFAULT_ALTERNATIVE = {"aa": "uniform", "bayes": "uniform", "lr": "distinguishable"}


class ValidatorRouter:
    """
    Routes validation requests to the matching validator based on identifier:
    - aa → row-norm test against the uniform sampler
    - bayes:gaussian → Bayesian confidence against the named alternative
    - lr → likelihood-ratio counter against distinguishable particles
    """

    def __init__(self):
        self.factories: Dict[str, Callable[..., BaseValidator]] = {}
        self._init_validators()

    def _init_validators(self):
        self.factories["aa"] = self._build_row_norm
        self.factories["bayes"] = self._build_bayes
        self.factories["lr"] = self._build_likelihood

    def parse_test_identifier(self, identifier: str) -> Tuple[str, str]:
        """
        Parse a test identifier into (test, alternative).

        Examples:
        - "bayes:gaussian" → ("bayes", "gaussian")
        - "lr" → ("lr", "distinguishable")
        """
        test, _, alternative = identifier.strip().lower().partition(":")
        if test not in self.factories:
            raise DomainError(f"unknown validation test: {test} (available: {self.describe_tests()})")
        alternative = alternative or DEFAULT_ALTERNATIVE[test]
        if alternative not in ALTERNATIVES:
            raise DomainError(f"unknown alternative hypothesis: {alternative}")
        if test == "aa" and alternative != "uniform":
            raise DomainError("the row-norm test only discriminates against the uniform sampler")
        return test, alternative

    def _build_row_norm(self, instance: SamplingInstance, p_main, alternative, params) -> BaseValidator:
        return RowNormValidator(instance.unitary, instance.inputs)

    def _build_bayes(self, instance: SamplingInstance, p_main, alternative, params) -> BaseValidator:
        return BayesValidator(HypothesisPair(p_main, make_alternative(alternative, instance, **params)))

    def _build_likelihood(self, instance: SamplingInstance, p_main, alternative, params) -> BaseValidator:
        return LikelihoodRatioValidator(p_main, make_alternative(alternative, instance, **params))

    def build(
        self,
        identifier: str,
        instance: SamplingInstance,
        p_main: Optional[Distribution] = None,
        **params: Any,
    ) -> BaseValidator:
        test, alternative = self.parse_test_identifier(identifier)
        if p_main is None and test != "aa":
            p_main = output_distribution(instance, "indistinguishable")
        validator = self.factories[test](instance, p_main, alternative, params)
        logger.debug("routing %s to %s (alternative=%s)", identifier, validator.get_validator_info(), alternative)
        return validator

    def validate(
        self,
        identifier: str,
        instance: SamplingInstance,
        events: EventLog,
        p_main: Optional[Distribution] = None,
        **params: Any,
    ) -> Tuple[CounterTrajectory, Verdict]:
        validator = self.build(identifier, instance, p_main, **params)
        trajectory = validator.run(events)
        verdict = validator.verdict(trajectory)
        logger.info("%s", verdict)
        return trajectory, verdict

    def list_validators(self) -> Dict[str, Any]:
        """List the available tests and their default alternatives."""
        return {
            "validators": [
                {"test": test, "default_alternative": DEFAULT_ALTERNATIVE[test]}
                for test in self.factories
            ],
            "count": len(self.factories),
        }

    def describe_tests(self) -> str:
        """One-line summary of `list_validators`, e.g. for help text."""
        return ", ".join(
            f"{entry['test']} (vs {entry['default_alternative']})" for entry in self.list_validators()["validators"]
        )


# Global router instance
_router: Optional[ValidatorRouter] = None


def get_router() -> ValidatorRouter:
    """Get or create the global validator router."""
    global _router
    if _router is None:
        _router = ValidatorRouter()
    return _router
