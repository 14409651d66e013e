"""Compile pulse schedules for the time-bin loop into multimode unitaries.

A loop holds K time bins, each with a horizontal (H) and a vertical (V)
polarization rail, giving 2K rail-modes. One circulation applies a
programmable rotation to every bin's (H, V) pair and then delays the V rail
by one bin, cyclically around the ring. N circulations compose into the
network; pass 1 acts first, so the network is pass_N @ ... @ pass_1.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterator, List, NamedTuple, Sequence, Tuple

import numpy as np

from . import config as settings
from .errors import DomainError, LeakageError, RefusalError
from .linalg import ModeConfiguration, UnitaryMatrix, check_unitary, identity, is_fully_connected
from .log import get_logger

logger = get_logger(__name__)

EXAMPLE_MAX_ATTEMPTS = 64
EXAMPLE_CONNECTIVITY = 1e-3


class Rail(IntEnum):
    H = 0
    V = 1

    @classmethod
    def parse(cls, value) -> "Rail":
        if isinstance(value, Rail):
            return value
        if isinstance(value, str) and value.upper() in cls.__members__:
            return cls[value.upper()]
        raise DomainError(f"rail must be 'H' or 'V', got {value!r}")


@dataclass(frozen=True, order=True)
class RailModeIndex:
    """A (slot, rail) pair; slots count from 1, flattened index from 0."""

    slot: int
    rail: Rail

    @property
    def index(self) -> int:
        return (self.slot - 1) * 2 + int(self.rail)

    @classmethod
    def from_index(cls, index: int) -> "RailModeIndex":
        if index < 0:
            raise DomainError(f"rail-mode index must be non-negative, got {index}")
        return cls(slot=index // 2 + 1, rail=Rail(index % 2))

    def __str__(self) -> str:
        return f"{self.slot}{self.rail.name}"


@dataclass(frozen=True)
class LoopConfig:
    slots: int = settings.DEFAULT_SLOTS
    loops: int = settings.DEFAULT_LOOPS
    bin_ns: float = settings.DEFAULT_BIN_NS
    injection: Tuple[RailModeIndex, ...] = ()

    def __post_init__(self):
        if self.slots < 1 or self.loops < 1:
            raise DomainError(f"need slots >= 1 and loops >= 1, got {self.slots} and {self.loops}")
        if self.bin_ns <= 0:
            raise DomainError("bin duration must be positive")
        injection = tuple(
            p if isinstance(p, RailModeIndex) else RailModeIndex(int(p[0]), Rail.parse(p[1]))
            for p in self.injection
        )
        slots_used = [p.slot for p in injection]
        if len(set(slots_used)) != len(slots_used):
            raise DomainError(f"injection slots must be distinct, got {slots_used}")
        for p in injection:
            if not 1 <= p.slot <= self.slots:
                raise DomainError(f"injection slot {p.slot} outside 1..{self.slots}")
        object.__setattr__(self, "injection", injection)

    @property
    def modes(self) -> int:
        return 2 * self.slots

    @property
    def loop_ns(self) -> float:
        return self.slots * self.bin_ns


@dataclass(frozen=True, eq=False)
class PulseSchedule:
    """Rotation angles and relative phases, one row per loop, one column per slot."""

    angles: np.ndarray
    phases: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        angles = np.array(self.angles, dtype=float, ndmin=2)
        phases = np.zeros_like(angles) if self.phases is None else np.array(self.phases, dtype=float, ndmin=2)
        if angles.ndim != 2 or phases.shape != angles.shape:
            raise DomainError(f"angles {angles.shape} and phases {phases.shape} must be matching N x K arrays")
        if not (np.all(np.isfinite(angles)) and np.all(np.isfinite(phases))):
            raise DomainError("schedule contains non-finite values")
        angles.setflags(write=False)
        phases.setflags(write=False)
        object.__setattr__(self, "angles", angles)
        object.__setattr__(self, "phases", phases)

    @property
    def loops(self) -> int:
        return self.angles.shape[0]

    @property
    def slots(self) -> int:
        return self.angles.shape[1]

    def check_against(self, loop_config: LoopConfig) -> None:
        if (self.loops, self.slots) != (loop_config.loops, loop_config.slots):
            raise DomainError(
                f"schedule is {self.loops}x{self.slots} but the loop has "
                f"{loop_config.loops} loops of {loop_config.slots} slots"
            )

    @classmethod
    def zeros(cls, loops: int, slots: int) -> "PulseSchedule":
        return cls(np.zeros((loops, slots)))


def rotation(theta: float, phi: float = 0.0) -> np.ndarray:
    """R(theta, phi) on the (H, V) pair of one bin."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array(
        [[c, -np.exp(1j * phi) * s], [np.exp(-1j * phi) * s, c]],
        dtype=np.complex128,
    )


def _v_shift(slots: int) -> np.ndarray:
    shift = np.zeros((2 * slots, 2 * slots), dtype=np.complex128)
    for t in range(slots):
        shift[2 * t, 2 * t] = 1.0
        shift[2 * ((t + 1) % slots) + 1, 2 * t + 1] = 1.0
    return shift


def pass_unitary(angles_row: Sequence[float], phases_row: Sequence[float] | None, slots: int) -> UnitaryMatrix:
    """One circulation: per-bin rotations followed by the one-bin V delay."""
    angles_row = np.asarray(angles_row, dtype=float)
    phases_row = np.zeros(slots) if phases_row is None else np.asarray(phases_row, dtype=float)
    if angles_row.shape != (slots,) or phases_row.shape != (slots,):
        raise DomainError(
            f"pass rows must have {slots} entries, got {angles_row.shape} and {phases_row.shape}"
        )
    rotations = np.zeros((2 * slots, 2 * slots), dtype=np.complex128)
    for t in range(slots):
        rotations[2 * t : 2 * t + 2, 2 * t : 2 * t + 2] = rotation(angles_row[t], phases_row[t])
    return UnitaryMatrix(_v_shift(slots) @ rotations)


def iter_prefixes(loop_config: LoopConfig, schedule: PulseSchedule) -> Iterator[Tuple[int, UnitaryMatrix]]:
    """Yield (k, pass_k @ ... @ pass_1) for k = 0..N, built incrementally."""
    schedule.check_against(loop_config)
    current = identity(loop_config.modes)
    yield 0, current
    for k in range(loop_config.loops):
        step = pass_unitary(schedule.angles[k], schedule.phases[k], loop_config.slots)
        current = UnitaryMatrix(step @ current)
        yield k + 1, current


def compile_prefix(loop_config: LoopConfig, schedule: PulseSchedule, loops_done: int) -> UnitaryMatrix:
    """Network after the first `loops_done` circulations; 0 gives the identity."""
    if not 0 <= loops_done <= loop_config.loops:
        raise DomainError(f"loops_done must lie in 0..{loop_config.loops}, got {loops_done}")
    for k, unitary in iter_prefixes(loop_config, schedule):
        if k == loops_done:
            return unitary
    raise AssertionError("unreachable")


def compile_network(loop_config: LoopConfig, schedule: PulseSchedule) -> UnitaryMatrix:
    return compile_prefix(loop_config, schedule, loop_config.loops)


def _subset_indices(mode_subset: Sequence) -> List[int]:
    indices = [m.index if isinstance(m, RailModeIndex) else int(m) for m in mode_subset]
    if len(set(indices)) != len(indices):
        raise DomainError(f"mode subset has repeated modes: {indices}")
    if not indices:
        raise DomainError("mode subset is empty")
    return indices


def closure_deviation(full, mode_subset: Sequence) -> float:
    """max |sub^dagger sub - I| of the block on `mode_subset`."""
    full = np.asarray(full)
    indices = _subset_indices(mode_subset)
    if max(indices) >= full.shape[0]:
        raise DomainError(f"mode subset {indices} exceeds network dimension {full.shape[0]}")
    return check_unitary(full[np.ix_(indices, indices)])


def effective_unitary(full, mode_subset: Sequence, tol: float | None = None) -> UnitaryMatrix:
    """The block of `full` on `mode_subset`, provided no amplitude leaves it."""
    tol = settings.CLOSURE_TOL if tol is None else tol
    indices = _subset_indices(mode_subset)
    deviation = closure_deviation(full, indices)
    if deviation > tol:
        raise LeakageError(deviation, tol)
    return UnitaryMatrix(np.asarray(full)[np.ix_(indices, indices)], tol=max(tol, settings.UNITARITY_TOL))


def injection_configuration(loop_config: LoopConfig, mode_subset: Sequence) -> ModeConfiguration:
    """Occupation vector over `mode_subset` for the injected photons."""
    indices = _subset_indices(mode_subset)
    occupations = [0] * len(indices)
    for p in loop_config.injection:
        try:
            occupations[indices.index(p.index)] += 1
        except ValueError:
            raise DomainError(f"injected mode {p} is not in the mode subset") from None
    return tuple(occupations)


class ExampleCircuit(NamedTuple):
    loop_config: LoopConfig
    schedule: PulseSchedule
    mode_subset: Tuple[RailModeIndex, ...]


def example_schedule(n_photons: int, m_modes: int, seed=None, loops: int = settings.DEFAULT_LOOPS) -> ExampleCircuit:
    """A representative fully connected circuit on m rail-modes.

    The ring is sized to m/2 bins so the subset is every rail-mode and stays
    closed after each circulation. Photons enter on the H rails of slots 1..n.
    """
    if m_modes < 2 or m_modes % 2:
        raise DomainError(f"m_modes must be a positive even number, got {m_modes}")
    slots = m_modes // 2
    if not 1 <= n_photons <= slots:
        raise DomainError(f"need 1 <= n_photons <= m_modes/2 = {slots}, got {n_photons}")
    rng = np.random.default_rng(seed)
    loop_config = LoopConfig(
        slots=slots,
        loops=loops,
        injection=tuple(RailModeIndex(slot, Rail.H) for slot in range(1, n_photons + 1)),
    )
    subset = tuple(RailModeIndex.from_index(i) for i in range(2 * slots))
    for attempt in range(EXAMPLE_MAX_ATTEMPTS):
        schedule = PulseSchedule(
            angles=rng.uniform(np.pi / 8, 3 * np.pi / 8, size=(loops, slots)),
            phases=rng.uniform(0.0, 2 * np.pi, size=(loops, slots)),
        )
        full = compile_network(loop_config, schedule)
        try:
            effective = effective_unitary(full, subset, tol=1e-8)
        except LeakageError:
            continue
        if is_fully_connected(effective, EXAMPLE_CONNECTIVITY):
            logger.debug("example schedule n=%d m=%d found after %d attempts", n_photons, m_modes, attempt + 1)
            return ExampleCircuit(loop_config, schedule, subset)
    raise RefusalError(f"no fully connected schedule for m={m_modes} after {EXAMPLE_MAX_ATTEMPTS} attempts")


__all__ = [
    "Rail",
    "RailModeIndex",
    "LoopConfig",
    "PulseSchedule",
    "ExampleCircuit",
    "rotation",
    "pass_unitary",
    "iter_prefixes",
    "compile_prefix",
    "compile_network",
    "closure_deviation",
    "effective_unitary",
    "injection_configuration",
    "example_schedule",
]
