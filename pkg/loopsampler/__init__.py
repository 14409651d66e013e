"""Simulator for loop-based time-bin boson sampling.

Compiles pulse schedules for a chain of fiber loops into a linear-optical
unitary, computes exact output distributions, draws events and validates
them against alternative hypotheses.
"""
from .compiler import (
    LoopConfig,
    PulseSchedule,
    Rail,
    RailModeIndex,
    compile_network,
    compile_prefix,
    effective_unitary,
    example_schedule,
)
from .errors import (
    ConsistencyError,
    DomainError,
    FormatError,
    LeakageError,
    LoopSamplerError,
    RefusalError,
)
from .linalg import UnitaryMatrix, haar_random_unitary, scattering_submatrix
from .permanent import permanent
from .sampling import Distribution, EventLog, SamplingInstance, draw_events, fidelity, output_distribution

__version__ = "0.1.0"

__all__ = [
    "ConsistencyError",
    "Distribution",
    "DomainError",
    "EventLog",
    "FormatError",
    "LeakageError",
    "LoopConfig",
    "LoopSamplerError",
    "PulseSchedule",
    "Rail",
    "RailModeIndex",
    "RefusalError",
    "SamplingInstance",
    "UnitaryMatrix",
    "compile_network",
    "compile_prefix",
    "draw_events",
    "effective_unitary",
    "example_schedule",
    "fidelity",
    "haar_random_unitary",
    "output_distribution",
    "permanent",
    "scattering_submatrix",
]
