"""Exception hierarchy shared by every loopsampler module.

Each class carries the process exit code the CLI uses when it escapes to
the top level.
"""
from __future__ import annotations

from typing import Any, Dict, List, Optional


class LoopSamplerError(Exception):
    exit_code = 1


class DomainError(LoopSamplerError, ValueError):
    """A precondition on shapes, photon numbers or parameters was violated."""

    exit_code = 4


class RefusalError(LoopSamplerError, RuntimeError):
    """The request is well-formed but beyond a scale guard."""

    exit_code = 4


class LeakageError(LoopSamplerError):
    """Amplitude escapes the chosen rail-mode subset."""

    exit_code = 3

    def __init__(self, deviation: float, tolerance: float, message: Optional[str] = None):
        self.deviation = float(deviation)
        self.tolerance = float(tolerance)
        super().__init__(
            message
            or f"mode subset is not closed: deviation {self.deviation:.3e} exceeds tolerance {self.tolerance:.1e}"
        )


class ConsistencyError(LoopSamplerError, ArithmeticError):
    exit_code = 1


class FormatError(LoopSamplerError):
    """A file failed to parse or to validate against its schema."""

    exit_code = 4

    def __init__(self, message: str, errors: Optional[List[Dict[str, Any]]] = None):
        self.errors = errors or []
        if self.errors:
            first = self.errors[0]
            message = f"{message}: {first['message']} at {first['path']}"
        super().__init__(message)


__all__ = [
    "LoopSamplerError",
    "DomainError",
    "RefusalError",
    "LeakageError",
    "ConsistencyError",
    "FormatError",
]
