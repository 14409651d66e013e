"""Exact output distributions and seeded event draws for n photons in m modes.

Three photon models are supported: ideal identical bosons (squared
permanents), fully distinguishable particles (permanents of |U|^2), and
partial distinguishability described by a Gram matrix of internal-state
overlaps. Output configurations are enumerated in a fixed lexicographic
order, which seeded sampling relies on for reproducibility.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Literal, Mapping, Optional, Sequence, Tuple

import numpy as np

from .errors import ConsistencyError, DomainError, RefusalError
from .linalg import ModeConfiguration, UnitaryMatrix, as_configuration, expand_modes, scattering_submatrix
from .log import get_logger
from .permanent import permanent_ryser

logger = get_logger(__name__)

Model = Literal["indistinguishable", "distinguishable", "partial"]
MODELS: Tuple[str, ...] = ("indistinguishable", "distinguishable", "partial")
MODEL_ALIASES: Dict[str, str] = {"ind": "indistinguishable", "dist": "distinguishable", "partial": "partial"}

PARTIAL_MAX_PHOTONS = 6
IMAGINARY_RESIDUE = 1e-12
NORMALIZATION_TOL = 1e-9
GRAM_TOL = 1e-10

# Overlap versus injection-slot separation, in bins (13 ns and 26 ns)
SOURCE_OVERLAPS: Dict[int, float] = {1: 0.978, 2: 0.970}


def resolve_model(name: str) -> str:
    model = MODEL_ALIASES.get(name, name)
    if model not in MODELS:
        raise DomainError(f"unknown photon model: {name}")
    return model


@dataclass(frozen=True, eq=False)
class SamplingInstance:
    """n photons entering `inputs` of an m-mode network.

    `transmission` is a uniform per-photon efficiency folded into the
    amplitudes as sqrt(transmission) * U; distributions are post-selected
    on all n photons arriving.
    """

    unitary: UnitaryMatrix
    inputs: ModeConfiguration
    transmission: float = 1.0

    def __post_init__(self):
        if not isinstance(self.unitary, UnitaryMatrix):
            object.__setattr__(self, "unitary", UnitaryMatrix(self.unitary))
        inputs = as_configuration(self.inputs, self.unitary.dim)
        if sum(inputs) < 1:
            raise DomainError("a sampling instance needs at least one photon")
        if not 0.0 < self.transmission <= 1.0:
            raise DomainError(f"transmission must lie in (0, 1], got {self.transmission}")
        object.__setattr__(self, "inputs", inputs)

    @property
    def m(self) -> int:
        return self.unitary.dim

    @property
    def n(self) -> int:
        return sum(self.inputs)

    @property
    def amplitudes(self) -> np.ndarray:
        if self.transmission == 1.0:
            return self.unitary.matrix
        return math.sqrt(self.transmission) * self.unitary.matrix

    def submatrix(self, outputs: Sequence[int]) -> np.ndarray:
        outputs = as_configuration(outputs, self.m)
        if sum(outputs) != self.n:
            raise DomainError(f"output {outputs} carries {sum(outputs)} photons, instance has {self.n}")
        return scattering_submatrix(self.amplitudes, self.inputs, outputs)


@dataclass(frozen=True, eq=False)
class Distribution:
    configurations: Tuple[ModeConfiguration, ...]
    probabilities: np.ndarray
    model: str
    postselected_weight: float = 1.0
    _index: Dict[ModeConfiguration, int] = field(init=False, repr=False)

    def __post_init__(self):
        probabilities = np.array(self.probabilities, dtype=float)
        if probabilities.shape != (len(self.configurations),):
            raise DomainError("one probability per configuration is required")
        if np.any(probabilities < 0) or abs(probabilities.sum() - 1.0) > NORMALIZATION_TOL:
            raise DomainError(f"probabilities must be non-negative and sum to 1, sum={probabilities.sum()!r}")
        probabilities.setflags(write=False)
        object.__setattr__(self, "configurations", tuple(tuple(c) for c in self.configurations))
        object.__setattr__(self, "probabilities", probabilities)
        object.__setattr__(self, "_index", {c: i for i, c in enumerate(self.configurations)})

    def __len__(self) -> int:
        return len(self.configurations)

    def __contains__(self, configuration) -> bool:
        return tuple(configuration) in self._index

    def index_of(self, configuration: Sequence[int]) -> int:
        try:
            return self._index[tuple(configuration)]
        except KeyError:
            raise DomainError(f"configuration {tuple(configuration)} is outside the support") from None

    def probability_of(self, configuration: Sequence[int]) -> float:
        return float(self.probabilities[self.index_of(configuration)])

    def as_dict(self) -> Dict[ModeConfiguration, float]:
        return dict(zip(self.configurations, self.probabilities.tolist()))

    def same_support(self, other: "Distribution") -> bool:
        return self.configurations == other.configurations


@dataclass(frozen=True)
class EventLog:
    events: Tuple[ModeConfiguration, ...]
    seed: Optional[int] = None
    instance: Optional[SamplingInstance] = field(default=None, compare=False)

    def __post_init__(self):
        events = tuple(tuple(int(x) for x in e) for e in self.events)
        if len({sum(e) for e in events}) > 1:
            raise DomainError("events in one log must carry the same photon number")
        object.__setattr__(self, "events", events)

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self):
        return iter(self.events)


def enumerate_output_configurations(m: int, n: int) -> List[ModeConfiguration]:
    """All occupation vectors of n photons in m modes, C(m+n-1, n) of them.

    Ordered lexicographically by the sorted list of occupied mode indices,
    so (1,0) precedes (0,1) and (2,0) precedes (1,1).
    """
    if m < 1 or n < 0:
        raise DomainError(f"need m >= 1 and n >= 0, got m={m}, n={n}")
    configurations = []
    for modes in itertools.combinations_with_replacement(range(m), n):
        occupations = [0] * m
        for mode in modes:
            occupations[mode] += 1
        configurations.append(tuple(occupations))
    return configurations


def _factorial_product(occupations: Iterable[int]) -> int:
    return math.prod(math.factorial(k) for k in occupations)


def _real_probability(value: complex) -> float:
    if abs(value.imag) > IMAGINARY_RESIDUE:
        raise ConsistencyError(f"probability has imaginary residue {value.imag:.3e}")
    return min(max(value.real, 0.0), 1.0)


def probability_indistinguishable(instance: SamplingInstance, outputs: Sequence[int]) -> float:
    """|Per(U_ST)|^2 / (prod t_j! prod s_i!)."""
    sub = instance.submatrix(outputs)
    value = abs(permanent_ryser(sub)) ** 2
    return min(value / (_factorial_product(outputs) * _factorial_product(instance.inputs)), 1.0)


def probability_distinguishable(instance: SamplingInstance, outputs: Sequence[int]) -> float:
    """Per(|U_ST|^2) / prod t_j!: independent classical routing of each photon."""
    sub = instance.submatrix(outputs)
    value = permanent_ryser(np.abs(sub) ** 2)
    return _real_probability(value / _factorial_product(outputs))


def as_gram(gram, n: int) -> np.ndarray:
    """Validate an n x n Gram matrix of internal-state overlaps."""
    arr = np.asarray(gram, dtype=np.complex128)
    if arr.shape != (n, n):
        raise DomainError(f"Gram matrix must be {n}x{n}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("Gram matrix contains non-finite entries")
    if np.max(np.abs(np.diag(arr) - 1.0)) > GRAM_TOL:
        raise DomainError("Gram matrix diagonal must be all ones")
    if np.max(np.abs(arr - arr.conj().T)) > GRAM_TOL:
        raise DomainError("Gram matrix must be Hermitian")
    if np.max(np.abs(arr)) > 1.0 + GRAM_TOL:
        raise DomainError("Gram matrix overlaps must not exceed 1 in modulus")
    if np.min(np.linalg.eigvalsh((arr + arr.conj().T) / 2)) < -GRAM_TOL:
        raise DomainError("Gram matrix is not positive semidefinite")
    return arr


def gram_from_separations(slots: Sequence[int], overlaps: Mapping[int, float] | None = None) -> np.ndarray:
    """Gram matrix for photons emitted in `slots`, from overlap by bin separation.

    Separations past the table reuse the overlap of the largest tabulated one.
    """
    table = dict(SOURCE_OVERLAPS if overlaps is None else overlaps)
    if not table or min(table) < 1:
        raise DomainError("overlap table needs positive separations")
    n = len(slots)
    gram = np.eye(n, dtype=np.complex128)
    for i, j in itertools.combinations(range(n), 2):
        separation = abs(int(slots[i]) - int(slots[j]))
        if separation == 0:
            value = 1.0
        else:
            known = [k for k in table if k <= separation]
            value = table[max(known)] if known else table[min(table)]
        gram[i, j] = gram[j, i] = value
    return as_gram(gram, n)


def _input_norm(inputs: Sequence[int], gram: np.ndarray) -> float:
    labels = expand_modes(inputs)
    norm = 1.0
    for mode in np.flatnonzero(np.asarray(inputs) > 1):
        block = np.flatnonzero(labels == mode)
        norm *= permanent_ryser(gram[np.ix_(block, block)]).real
    return norm


def probability_partial(instance: SamplingInstance, outputs: Sequence[int], gram) -> float:
    """Double permutation sum weighting amplitude pairs by internal-state overlaps.

    Photons sharing an input mode contribute the permanent of their Gram block
    to the input-state norm: s! for identical photons, 1 for orthogonal ones.
    """
    n = instance.n
    if n > PARTIAL_MAX_PHOTONS:
        raise RefusalError(f"partial-distinguishability model refused for n={n} > {PARTIAL_MAX_PHOTONS}")
    g = as_gram(gram, n)
    sub = instance.submatrix(outputs)
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.intp)
    k = np.arange(n)
    # amps[p, k]: photon perms[p, k] arriving at output slot k
    amps = sub[k[None, :], perms]
    conj_amps = amps.conj()
    total = 0j
    for p in range(len(perms)):
        weights = g[perms[p][None, :], perms]
        total += np.sum(np.prod(weights * amps[p][None, :] * conj_amps, axis=1))
    return _real_probability(total / (_factorial_product(outputs) * _input_norm(instance.inputs, g)))


def output_distribution(instance: SamplingInstance, model: str, gram=None) -> Distribution:
    model = resolve_model(model)
    configurations = enumerate_output_configurations(instance.m, instance.n)
    if model == "indistinguishable":
        raw = [probability_indistinguishable(instance, t) for t in configurations]
    elif model == "distinguishable":
        raw = [probability_distinguishable(instance, t) for t in configurations]
    else:
        if gram is None:
            raise DomainError("the partial model requires a Gram matrix")
        g = as_gram(gram, instance.n)
        raw = [probability_partial(instance, t, g) for t in configurations]
    raw = np.asarray(raw, dtype=float)
    total = float(raw.sum())
    if instance.transmission == 1.0:
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ConsistencyError(f"{model} distribution sums to {total!r}")
        probabilities = raw
    else:
        if total <= 0.0:
            raise ConsistencyError("post-selected weight vanished")
        probabilities = raw / total
    return Distribution(tuple(configurations), probabilities, model, postselected_weight=total)


def uniform_distribution(m: int, n: int) -> Distribution:
    configurations = enumerate_output_configurations(m, n)
    return Distribution(tuple(configurations), np.full(len(configurations), 1.0 / len(configurations)), "uniform")


def draw_events(distribution: Distribution, count: int, seed=None, instance: SamplingInstance | None = None) -> EventLog:
    """i.i.d. draws by inverse CDF over the ordered configuration list."""
    if count < 0:
        raise DomainError(f"event count must be non-negative, got {count}")
    rng = np.random.default_rng(seed)
    cdf = np.cumsum(distribution.probabilities)
    cdf /= cdf[-1]
    picks = np.searchsorted(cdf, rng.random(count), side="right")
    picks = np.minimum(picks, len(cdf) - 1)
    events = tuple(distribution.configurations[i] for i in picks)
    seed_value = int(seed) if isinstance(seed, (int, np.integer)) else None
    return EventLog(events, seed=seed_value, instance=instance)


def _check_supports(p: Distribution, q: Distribution) -> None:
    if not p.same_support(q):
        raise DomainError("distributions are defined over different configuration lists")


def fidelity(p: Distribution, q: Distribution) -> float:
    """Bhattacharyya overlap sum_i sqrt(p_i q_i)."""
    _check_supports(p, q)
    value = float(np.sum(np.sqrt(p.probabilities * q.probabilities)))
    return min(value, 1.0)


def total_variation(p: Distribution, q: Distribution) -> float:
    _check_supports(p, q)
    return 0.5 * float(np.sum(np.abs(p.probabilities - q.probabilities)))


def empirical_distribution(events: EventLog | Sequence[Sequence[int]], support: Distribution | Sequence) -> Distribution:
    """Relative frequencies of `events` over the configurations of `support`."""
    configurations = support.configurations if isinstance(support, Distribution) else tuple(tuple(c) for c in support)
    index = {c: i for i, c in enumerate(configurations)}
    counts = np.zeros(len(configurations))
    total = 0
    for event in events:
        try:
            counts[index[tuple(event)]] += 1
        except KeyError:
            raise DomainError(f"event {tuple(event)} is outside the support") from None
        total += 1
    if total == 0:
        raise DomainError("cannot form frequencies from an empty event log")
    return Distribution(configurations, counts / total, "empirical")


def is_collision(configuration: Sequence[int]) -> bool:
    return max(configuration) > 1


def collision_probability(distribution: Distribution) -> float:
    mask = np.array([is_collision(c) for c in distribution.configurations])
    return float(distribution.probabilities[mask].sum())


def observed_support(events: EventLog | Iterable[Sequence[int]]) -> int:
    """Number of distinct configurations recorded."""
    return len(Counter(tuple(e) for e in events))


__all__ = [
    "MODELS",
    "SamplingInstance",
    "Distribution",
    "EventLog",
    "resolve_model",
    "enumerate_output_configurations",
    "probability_indistinguishable",
    "probability_distinguishable",
    "probability_partial",
    "as_gram",
    "gram_from_separations",
    "output_distribution",
    "uniform_distribution",
    "draw_events",
    "fidelity",
    "total_variation",
    "empirical_distribution",
    "is_collision",
    "collision_probability",
    "observed_support",
]
