"""Complex matrix foundation: unitaries, Haar sampling and scattering submatrices.

Matrices are plain `numpy` complex arrays. `UnitaryMatrix` wraps one and
guarantees unitarity at construction; nothing here re-orthogonalizes, so a
compiler bug that breaks unitarity surfaces as a construction failure.

Index convention: `U[out, in]`. Column j is the image of input mode j.
"""
from __future__ import annotations

from typing import Iterable, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import qr

from . import config
from .errors import DomainError

ModeConfiguration = Tuple[int, ...]
Seed = Union[int, np.random.Generator, None]


def as_complex_matrix(matrix) -> np.ndarray:
    """Validate and return a 2-D finite complex array."""
    arr = np.asarray(matrix, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DomainError(f"expected a non-empty 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("matrix contains NaN or Inf entries")
    return arr


def as_configuration(occupations: Iterable[int], modes: int | None = None) -> ModeConfiguration:
    """Return an occupation vector as a tuple of non-negative ints."""
    config_ = tuple(int(x) for x in occupations)
    if any(x < 0 for x in config_):
        raise DomainError(f"negative occupation in {config_}")
    if modes is not None and len(config_) != modes:
        raise DomainError(f"configuration {config_} has {len(config_)} modes, expected {modes}")
    return config_


def expand_modes(occupations: Sequence[int]) -> np.ndarray:
    """Mode indices with multiplicity, ascending: (1,0,2) -> [0, 2, 2]."""
    return np.repeat(np.arange(len(occupations)), occupations)


def check_unitary(matrix) -> float:
    """Return max |M^dagger M - I|; the caller decides the tolerance."""
    arr = as_complex_matrix(matrix)
    if arr.shape[0] != arr.shape[1]:
        raise DomainError(f"unitarity check needs a square matrix, got {arr.shape}")
    gram = arr.conj().T @ arr
    return float(np.max(np.abs(gram - np.eye(arr.shape[0]))))


class UnitaryMatrix:
    """A square complex matrix verified unitary to `tol` at construction."""

    __slots__ = ("_matrix", "deviation")

    def __init__(self, matrix, tol: float | None = None):
        arr = as_complex_matrix(matrix)
        tol = config.UNITARITY_TOL if tol is None else tol
        deviation = check_unitary(arr)
        if deviation > tol:
            raise DomainError(f"matrix is not unitary: deviation {deviation:.3e} > {tol:.1e}")
        arr = arr.copy()
        arr.setflags(write=False)
        self._matrix = arr
        self.deviation = deviation

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def dim(self) -> int:
        return self._matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._matrix
        return self._matrix.astype(dtype)

    def __matmul__(self, other: "UnitaryMatrix") -> np.ndarray:
        return self._matrix @ np.asarray(other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, UnitaryMatrix):
            return NotImplemented
        return np.array_equal(self._matrix, other._matrix)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"UnitaryMatrix(dim={self.dim}, deviation={self.deviation:.1e})"


def identity(dim: int) -> UnitaryMatrix:
    if dim < 1:
        raise DomainError("dimension must be at least 1")
    return UnitaryMatrix(np.eye(dim, dtype=np.complex128))


def haar_random_unitary(dim: int, seed: Seed = None) -> UnitaryMatrix:
    """Haar-distributed unitary via QR of a Ginibre matrix with phase-fixed R."""
    if dim < 1:
        raise DomainError("dimension must be at least 1")
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = qr(z)
    d = np.diag(r)
    q = q * (d / np.abs(d))
    return UnitaryMatrix(q)


def scattering_submatrix(unitary, inputs: Sequence[int], outputs: Sequence[int]) -> np.ndarray:
    """n x n submatrix: rows are output modes, columns input modes, with multiplicity.

    Multiplicities are placed adjacently in ascending mode order.
    """
    u = np.asarray(unitary)
    m = u.shape[0]
    s = as_configuration(inputs, m)
    t = as_configuration(outputs, m)
    if sum(s) != sum(t):
        raise DomainError(f"photon number mismatch: inputs carry {sum(s)}, outputs {sum(t)}")
    if sum(s) < 1:
        raise DomainError("scattering submatrix needs at least one photon")
    return u[np.ix_(expand_modes(t), expand_modes(s))]


def is_fully_connected(unitary, threshold: float) -> bool:
    if threshold < 0:
        raise DomainError("threshold must be non-negative")
    return bool(np.all(np.abs(np.asarray(unitary)) > threshold))


__all__ = [
    "ModeConfiguration",
    "UnitaryMatrix",
    "as_complex_matrix",
    "as_configuration",
    "expand_modes",
    "check_unitary",
    "identity",
    "haar_random_unitary",
    "scattering_submatrix",
    "is_fully_connected",
]
