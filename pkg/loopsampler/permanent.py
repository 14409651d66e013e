"""Matrix permanent: Ryser/Gray-code kernel plus a brute-force oracle."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import config
from .errors import DomainError, RefusalError
from .linalg import as_complex_matrix
from .log import get_logger

logger = get_logger(__name__)

try:
    import numba as _nb
except ModuleNotFoundError:  # pragma: no cover
    _nb = None

NAIVE_MAX_ORDER = 9
COMPENSATED_FROM_ORDER = 16


@dataclass(frozen=True)
class PermanentResult:
    value: complex
    n: int
    method: Literal["ryser", "naive"]


def _ryser_gray_py(mat: np.ndarray, compensated: bool) -> complex:
    """Per(A) = (-1)^n sum_S (-1)^|S| prod_i sum_{j in S} a_ij over Gray-ordered S."""
    n = mat.shape[0]
    row_sums = np.zeros(n, dtype=np.complex128)
    total = 0j
    carry = 0j
    gray = 0
    sign = 1.0
    for k in range(1, 1 << n):
        # column flipped between consecutive Gray codes = trailing zeros of k
        j = 0
        kk = k
        while (kk & 1) == 0:
            kk >>= 1
            j += 1
        bit = 1 << j
        if gray & bit:
            for i in range(n):
                row_sums[i] -= mat[i, j]
        else:
            for i in range(n):
                row_sums[i] += mat[i, j]
        gray ^= bit
        sign = -sign
        prod = 1.0 + 0j
        for i in range(n):
            prod *= row_sums[i]
        term = sign * prod
        if compensated:
            y = term - carry
            t = total + y
            carry = (t - total) - y
            total = t
        else:
            total += term
    if n & 1:
        return -total
    return total


_ryser_kernel = _ryser_gray_py
if _nb is not None and not config.DISABLE_JIT:
    _ryser_kernel = _nb.njit(cache=True)(_ryser_gray_py)


def _square(matrix) -> np.ndarray | None:
    arr = np.asarray(matrix, dtype=np.complex128)
    if arr.size == 0 and arr.ndim == 2 and arr.shape[0] == arr.shape[1]:
        return None
    arr = as_complex_matrix(arr)
    if arr.shape[0] != arr.shape[1]:
        raise DomainError(f"permanent needs a square matrix, got shape {arr.shape}")
    return arr


def permanent_ryser(matrix) -> complex:
    """Exact permanent in O(2^n n) operations. The 0x0 permanent is 1."""
    global _ryser_kernel
    arr = _square(matrix)
    if arr is None:
        return 1 + 0j
    arr = np.ascontiguousarray(arr)
    compensated = arr.shape[0] >= COMPENSATED_FROM_ORDER
    try:
        return complex(_ryser_kernel(arr, compensated))
    except Exception as exc:
        if _ryser_kernel is _ryser_gray_py:
            raise
        logger.warning("JIT permanent kernel failed (%s); using pure-Python kernel", exc)
        _ryser_kernel = _ryser_gray_py
        return complex(_ryser_kernel(arr, compensated))


def permanent_naive(matrix) -> complex:
    """Direct sum over all n! permutations; refuses n > 9."""
    arr = _square(matrix)
    if arr is None:
        return 1 + 0j
    n = arr.shape[0]
    if n > NAIVE_MAX_ORDER:
        raise RefusalError(f"naive permanent refused for n={n} > {NAIVE_MAX_ORDER}")
    rows = np.arange(n)
    total = 0j
    for sigma in itertools.permutations(range(n)):
        total += np.prod(arr[rows, sigma])
    return complex(total)


def permanent(matrix, method: Literal["ryser", "naive"] = "ryser") -> PermanentResult:
    if method == "ryser":
        value = permanent_ryser(matrix)
    elif method == "naive":
        value = permanent_naive(matrix)
    else:
        raise DomainError(f"unknown permanent method: {method}")
    n = np.asarray(matrix).shape[0] if np.asarray(matrix).ndim == 2 else 0
    return PermanentResult(value=value, n=n, method=method)


__all__ = ["PermanentResult", "permanent", "permanent_ryser", "permanent_naive"]
