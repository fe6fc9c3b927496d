"""MDL source-number estimation from sorted sample eigenvalues.

The scalar functions (:func:`arithmetic_mean_tail`, :func:`mdl_criterion`,
:func:`estimate_d`) follow the textbook definitions term by term.
:func:`estimate_d_batch` is the fast path used by the Monte Carlo harness;
it dispatches to the compiled kernel when available.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import _kernels_py

if os.environ.get("MDLPERF_PURE_PYTHON"):
    _kernels = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _kernels = _kernels_py
        BACKEND = "python"


class DegenerateSpectrumError(ValueError):
    """Raised when a tail of the spectrum contains a non-positive eigenvalue."""


@dataclass
class MdlResult:
    criterion: np.ndarray
    d_hat: int
    a: np.ndarray
    g: np.ndarray


def _spectrum(l) -> np.ndarray:
    l = np.asarray(l, dtype=float)
    if l.ndim != 1 or l.size < 1:
        raise ValueError("expected a 1-D eigenvalue array")
    if np.any(np.diff(l) > 0):
        raise ValueError("eigenvalues must be sorted in descending order")
    return l


def _check_order(L: int, d: int) -> None:
    if not 0 <= d <= L - 1:
        raise ValueError(f"order d={d} outside [0, {L - 1}]")


def arithmetic_mean_tail(l, d: int) -> float:
    """Mean of the ``L - d`` smallest eigenvalues."""
    l = _spectrum(l)
    _check_order(l.size, d)
    return float(np.mean(l[d:]))


def geometric_mean_tail(l, d: int) -> float:
    """Geometric mean of the ``L - d`` smallest eigenvalues (log domain)."""
    l = _spectrum(l)
    _check_order(l.size, d)
    tail = l[d:]
    if np.any(tail <= 0):
        raise DegenerateSpectrumError("tail eigenvalues must be positive")
    return float(np.exp(np.mean(np.log(tail))))


def mdl_criterion(l, d: int, n: int) -> float:
    """MDL cost ``n(L-d) log(a_d/g_d) + d(2L-d) log(n) / 2``."""
    l = _spectrum(l)
    L = l.size
    if n < 2:
        raise ValueError("need n >= 2")
    _check_order(L, d)
    tail = l[d:]
    if np.any(tail <= 0):
        raise DegenerateSpectrumError("tail eigenvalues must be positive")
    # log(a/g) as a difference of logs: no overflow in the product for large L.
    data = np.log(np.mean(tail)) - np.mean(np.log(tail))
    return float(n * (L - d) * max(data, 0.0) + 0.5 * d * (2 * L - d) * np.log(n))


def estimate_d(l, n: int) -> MdlResult:
    """Minimise the MDL criterion over ``d = 0..L-1`` (ties go to the smaller d)."""
    l = _spectrum(l)
    L = l.size
    crit = np.array([mdl_criterion(l, d, n) for d in range(L)])
    a = np.array([arithmetic_mean_tail(l, d) for d in range(L)])
    g = np.array([geometric_mean_tail(l, d) for d in range(L)])
    return MdlResult(crit, int(np.argmin(crit)), a, g)


def estimate_d_batch(eigs, n: int, return_criterion: bool = False):
    """Vectorised :func:`estimate_d` over rows of a ``(trials, L)`` array.

    Returns the int64 array of estimates, plus the ``(trials, L)`` criterion
    matrix when ``return_criterion`` is set.
    """
    eigs = np.ascontiguousarray(eigs, dtype=np.float64)
    if eigs.ndim != 2:
        raise ValueError("expected a (trials, L) array")
    if eigs.size and eigs.min() <= 0:
        raise DegenerateSpectrumError("all sample eigenvalues must be positive (is n < L?)")
    crit = np.empty_like(eigs) if return_criterion else None
    d_hat = np.asarray(_kernels.mdl_scan(eigs, float(n), crit))
    return (d_hat, crit) if return_criterion else d_hat
