"""Statistical validators for boson-sampling event streams."""

from .alternatives import ALTERNATIVES, gaussian_distribution, make_alternative
from .base import BaseValidator, CounterTrajectory, HypothesisPair, Verdict
from .bayes import BayesValidator, bayes_confidence
from .likelihood import LikelihoodRatioValidator, lr_counter
from .row_norm import RowNormValidator, aa_counter, row_norm_statistic
from .router import ValidatorRouter, get_router

__all__ = [
    "ALTERNATIVES",
    "BaseValidator",
    "BayesValidator",
    "CounterTrajectory",
    "HypothesisPair",
    "LikelihoodRatioValidator",
    "RowNormValidator",
    "ValidatorRouter",
    "Verdict",
    "aa_counter",
    "bayes_confidence",
    "gaussian_distribution",
    "get_router",
    "lr_counter",
    "make_alternative",
    "row_norm_statistic",
]
