"""Snapshot generation under the stochastic and deterministic signal models."""
from __future__ import annotations

from typing import Iterable, NamedTuple

import numpy as np

from .numerics import as_generator, hermitian_eigvals, sample_circular_gaussian
from .scenario import DETERMINISTIC, Scenario, SourceSet, steering_matrix


class SnapshotSet(NamedTuple):
    X: np.ndarray
    sample_cov: np.ndarray
    sample_eigs: np.ndarray


def sample_covariance(X) -> np.ndarray:
    """``(1/n) X X^H`` for ``X`` of shape ``(L, n)`` or a stack ``(..., L, n)``."""
    X = np.asarray(X)
    if X.ndim < 2 or X.shape[-1] == 0 or X.shape[-2] == 0:
        raise ValueError(f"need a non-empty (L, n) snapshot matrix, got shape {X.shape}")
    n = X.shape[-1]
    R = X @ np.swapaxes(X.conj(), -1, -2) / n
    return 0.5 * (R + np.swapaxes(R.conj(), -1, -2))


def unit_waveforms(d: int, n: int, rng) -> np.ndarray:
    """Random-phase rows whitened so that ``(1/n) S S^H = I`` exactly.

    Raises:
        ValueError: when ``n < d`` (the Gram matrix would be singular).
    """
    if n < d:
        raise ValueError(f"need n >= d for an exact Gram constraint (n={n}, d={d})")
    if d == 0:
        return np.zeros((0, n), dtype=complex)
    g = as_generator(rng)
    S0 = np.exp(2j * np.pi * g.random((d, n)))
    G = S0 @ S0.conj().T / n
    w, U = np.linalg.eigh(G)
    G_inv_half = (U / np.sqrt(w)) @ U.conj().T
    S = G_inv_half @ S0
    # One refinement pass squeezes the Gram error down to rounding level.
    G = S @ S.conj().T / n
    w, U = np.linalg.eigh(G)
    return ((U / np.sqrt(w)) @ U.conj().T) @ S


def deterministic_source_matrix(sources: SourceSet, n: int, rng, unit=None) -> np.ndarray:
    """Deterministic waveforms with ``(1/n) S S^H = P`` holding exactly.

    ``unit`` may carry a pre-drawn output of :func:`unit_waveforms` so one
    realisation can be reused across SNR points.
    """
    if unit is None:
        unit = unit_waveforms(sources.d, n, rng)
    return np.sqrt(np.asarray(sources.powers))[:, None] * unit


def _draw_X(s: Scenario, g: np.random.Generator, S=None) -> np.ndarray:
    L, n, d = s.L, s.n, s.d
    A = steering_matrix(s.sources.doas, L)
    if d and s.model == DETERMINISTIC:
        if S is None:
            S = deterministic_source_matrix(s.sources, n, g)
        signal = A @ S
    elif d:
        S = sample_circular_gaussian(np.zeros((d, n)), 1.0, g)
        signal = A @ (np.sqrt(np.asarray(s.sources.powers))[:, None] * S)
    else:
        signal = 0.0
    return signal + sample_circular_gaussian(np.zeros((L, n)), s.noise_var, g)


def generate_snapshots(s: Scenario, rng, S=None) -> SnapshotSet:
    """Draw ``X = A S + V`` and its sample covariance.

    Under the deterministic model ``S`` is taken as given when supplied
    (the conditional model); otherwise a fresh Gram-corrected waveform is
    drawn from ``rng`` first.
    """
    X = _draw_X(s, as_generator(rng), S)
    R = sample_covariance(X)
    return SnapshotSet(X, R, hermitian_eigvals(R))


def sample_eigenvalues(s: Scenario, streams: Iterable, S=None, signal_streams=None) -> np.ndarray:
    """Sorted sample eigenvalues, one row per stream, shape ``(trials, L)``.

    Each trial draws exclusively from its own stream, so the result for a
    given stream does not depend on which other streams share the batch.
    Under the deterministic model, ``signal_streams`` (one per trial) makes
    every trial redraw its own waveform instead of sharing ``S``.
    """
    streams = list(streams)
    if signal_streams is None:
        X = [_draw_X(s, as_generator(r), S) for r in streams]
    else:
        X = [_draw_X(s, as_generator(r), deterministic_source_matrix(s.sources, s.n, q))
             for r, q in zip(streams, signal_streams, strict=True)]
    return hermitian_eigvals(sample_covariance(np.stack(X)))
