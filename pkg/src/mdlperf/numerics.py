"""Low-level numerical helpers shared by the rest of the package.

Everything here is a thin, contract-checked layer over numpy/scipy:
Hermitian eigendecomposition with descending ordering, circular complex
Gaussian draws, the Gaussian tail function and reproducible RNG streams.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import erfc

HERMITIAN_RTOL = 1e-10

# RngStream namespaces keep unrelated draws (noise vs. the fixed deterministic
# waveform vs. validator blocks) from ever sharing a stream.
NS_TRIAL = 0
NS_SIGNAL = 1
NS_VALIDATION = 2


class EigenPair(NamedTuple):
    values: np.ndarray
    vectors: np.ndarray


@dataclass(frozen=True)
class RngStream:
    """Identifies an independent random stream by ``(seed, stream_id)``.

    The same triple always yields the same sequence, regardless of the
    process or thread that materialises it.
    """

    seed: int
    stream_id: int = 0
    namespace: int = NS_TRIAL

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.namespace, self.stream_id))
        return np.random.Generator(np.random.PCG64(ss))


def as_generator(rng) -> np.random.Generator:
    """Accept an RngStream, a Generator or an int seed."""
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngStream):
        return rng.generator()
    if rng is None or isinstance(rng, (int, np.integer)):
        return np.random.default_rng(rng)
    raise TypeError(f"cannot build a generator from {type(rng).__name__}")


def _check_hermitian(M: np.ndarray) -> None:
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    scale = np.linalg.norm(M)
    if np.linalg.norm(M - M.conj().T) > HERMITIAN_RTOL * max(scale, 1e-300):
        raise ValueError("matrix is not Hermitian to relative tolerance 1e-10")


def hermitian_eigensolve(M) -> EigenPair:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    Ties keep LAPACK's order (stable sort), so column ``i`` of ``vectors``
    always pairs with ``values[i]``.

    Raises:
        ValueError: if ``M`` is not square or not Hermitian.
    """
    M = np.asarray(M)
    _check_hermitian(M)
    w, v = np.linalg.eigh(M)
    order = np.argsort(-w, kind="stable")
    return EigenPair(w[order], v[:, order])


def hermitian_eigvals(M) -> np.ndarray:
    """Eigenvalues only, descending. Accepts a stack of matrices ``(..., L, L)``."""
    w = np.linalg.eigvalsh(np.asarray(M))
    return w[..., ::-1]


def sample_circular_gaussian(mean, variance: float, rng, size=None) -> np.ndarray:
    """Draw ``mean + v`` with ``v`` circular complex Gaussian, ``E|v_k|^2 = variance``.

    Real and imaginary parts are independent with variance ``variance / 2``.
    ``size`` defaults to the shape of ``mean``.
    """
    if not variance > 0:
        raise ValueError(f"variance must be positive, got {variance}")
    mean = np.asarray(mean, dtype=complex)
    shape = mean.shape if size is None else size
    g = as_generator(rng)
    scale = np.sqrt(variance / 2.0)
    return mean + scale * (g.standard_normal(shape) + 1j * g.standard_normal(shape))


def gaussian_q(t):
    """Gaussian tail probability ``Q(t) = P(N(0, 1) > t)``."""
    return 0.5 * erfc(np.asarray(t, dtype=float) / np.sqrt(2.0))[()]
