"""Finite-sample eigenvalue statistics of the sample covariance.

Signal eigenvalues: first-order (1/n) mean and variance under the
stochastic and deterministic (non-central) signal models, plus the
non-central generalisation of Brillinger's covariance of bilinear forms.

Noise eigenvalues: the Marchenko-Pastur bulk law and a two-moment
Tracy-Widom approximation of the largest null eigenvalue.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .scenario import DETERMINISTIC, STOCHASTIC, PopulationSpectrum

SEPARATION_FLOOR = 1e-6


class IllConditionedWarning(RuntimeWarning):
    """Two population eigenvalues are too close for the perturbation expansion."""


@dataclass
class EigMoments:
    """Per-index mean and variance; NaN marks noise or ill-conditioned indices."""

    means: np.ndarray
    variances: np.ndarray
    model: str

    @property
    def stds(self) -> np.ndarray:
        return np.sqrt(self.variances)


def brillinger_cov(alpha, beta, gamma, zeta, Sigma, n, mu=None) -> complex:
    """Covariance of ``alpha^H R beta`` and ``gamma^H R zeta`` for ``R = Y Y^H / n``.

    The columns of ``Y`` are independent circular Gaussian vectors with
    covariance ``Sigma`` and means given by the columns of ``mu`` (L, n).
    ``mu=None`` is the zero-mean case. Covariance is taken as
    ``E[(a - Ea) conj(b - Eb)]``.
    """
    alpha, beta, gamma, zeta = (np.asarray(v, dtype=complex).ravel() for v in (alpha, beta, gamma, zeta))
    Sigma = np.asarray(Sigma, dtype=complex)
    L = Sigma.shape[0]
    if Sigma.shape != (L, L) or any(v.size != L for v in (alpha, beta, gamma, zeta)):
        raise ValueError("vector lengths must match the covariance dimension")
    ag = alpha.conj() @ Sigma @ gamma
    zb = zeta.conj() @ Sigma @ beta
    c = ag * zb / n
    if mu is not None:
        mu = np.asarray(mu, dtype=complex)
        if mu.shape != (L, n):
            raise ValueError(f"mean matrix must have shape {(L, n)}, got {mu.shape}")
        M = mu @ mu.conj().T
        c += (alpha.conj() @ M @ gamma) * zb / n**2 + ag * (zeta.conj() @ M @ beta) / n**2
    return complex(c)


def _bias_terms(lam: np.ndarray, sigma2: float, d: int, n: int, model: str):
    L = lam.size
    means = np.full(L, np.nan)
    variances = np.full(L, np.nan)
    floor = SEPARATION_FLOOR * sigma2
    for i in range(d):
        others = np.delete(lam, i)
        gap = lam[i] - others
        if np.any(np.abs(gap) <= floor):
            warnings.warn(
                f"eigenvalue {i} is within {floor:g} of another; moments left undefined",
                IllConditionedWarning,
                stacklevel=3,
            )
            continue
        if model == STOCHASTIC:
            means[i] = lam[i] + np.sum(lam[i] * others / (n * gap))
            variances[i] = lam[i] ** 2 / n
        else:
            means[i] = lam[i] + np.sum(((lam[i] + others) * sigma2 - sigma2**2) / (n * gap))
            variances[i] = (2 * lam[i] * sigma2 - sigma2**2) / n
    return EigMoments(means, variances, model)


def stochastic_eig_moments(spectrum: PopulationSpectrum, n: int) -> EigMoments:
    """Mean and variance of the signal sample eigenvalues, Gaussian sources."""
    return _bias_terms(spectrum.lambdas, spectrum.sigma2, spectrum.d, n, STOCHASTIC)


def deterministic_eig_moments(spectrum: PopulationSpectrum, n: int) -> EigMoments:
    """Mean and variance of the signal sample eigenvalues, deterministic sources."""
    return _bias_terms(spectrum.lambdas, spectrum.sigma2, spectrum.d, n, DETERMINISTIC)


def eig_moments(spectrum: PopulationSpectrum, n: int, model: str = STOCHASTIC) -> EigMoments:
    if model not in (STOCHASTIC, DETERMINISTIC):
        raise ValueError(f"unknown model {model!r}")
    return _bias_terms(spectrum.lambdas, spectrum.sigma2, spectrum.d, n, model)


def perturbation_coeff_var(spectrum: PopulationSpectrum, n: int, i: int, k: int) -> float:
    """Variance of the first-order eigenvector mixing weight ``t_ik``.

    Deterministic model with the perturbation factor absorbed, i.e. the
    variance of ``v_k^H (R_hat - R) v_i / (lambda_i - lambda_k)``.
    """
    lam, s2 = spectrum.lambdas, spectrum.sigma2
    if i == k:
        raise ValueError("t_ik is defined for i != k")
    return float(((lam[i] + lam[k]) * s2 - s2**2) / (n * (lam[i] - lam[k]) ** 2))


@dataclass(frozen=True)
class MpLaw:
    """Marchenko-Pastur law for ``gamma = n / L`` with unit noise power."""

    gamma: float

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")

    @property
    def a(self) -> float:
        return (1 - self.gamma**-0.5) ** 2

    @property
    def b(self) -> float:
        return (1 + self.gamma**-0.5) ** 2

    @property
    def support(self) -> tuple[float, float]:
        return self.a, self.b


def mp_density(l, law: MpLaw):
    """Bulk density of the null-case sample eigenvalues; zero off the support."""
    l = np.asarray(l, dtype=float)
    a, b = law.support
    inside = (l >= a) & (l <= b) & (l > 0)
    out = np.zeros_like(l)
    li = l[inside]
    out[inside] = law.gamma / (2 * np.pi * li) * np.sqrt(np.clip((b - li) * (li - a), 0, None))
    return out[()]


def mp_cdf(l, law: MpLaw, resolution: int = 8193):
    """Distribution function of :func:`mp_density`.

    Tabulated under the substitution ``l = a + (b - a) sin^2 phi``, which
    makes the integrand smooth even at a hard edge ``a = 0``.
    """
    a, b = law.support
    phi = np.linspace(0, np.pi / 2, resolution)
    s, c = np.sin(phi), np.cos(phi)
    x = a + (b - a) * s**2
    with np.errstate(invalid="ignore", divide="ignore"):
        integrand = law.gamma / (2 * np.pi) * 2 * (b - a) ** 2 * (s * c) ** 2 / x
    integrand[~np.isfinite(integrand)] = law.gamma / (2 * np.pi) * 2 * (b - a)  # x -> 0 limit when a = 0
    F = cumulative_trapezoid(integrand, phi, initial=0.0)
    F /= F[-1]
    return np.interp(np.asarray(l, dtype=float), x, F, left=0.0, right=1.0)[()]


def tw_largest_moments(n: int, L: int) -> tuple[float, float]:
    """Approximate mean and std of the largest null eigenvalue (unit noise)."""
    if n < 2 or L < 2:
        raise ValueError("need n, L >= 2")
    mu = (1 + np.sqrt(L / n)) ** 2
    sigma = np.sqrt(mu / n) * (n**-0.5 + L**-0.5) ** (1 / 3)
    return float(mu - 1.8 * sigma), float(0.9 * sigma)


def variance_equivalence(L: int, n: int, sigma2: float = 1.0) -> tuple[float, float]:
    """First-order variances of the weakest signal eigenvalue at the bulk edge.

    Returns ``(stochastic, deterministic)``; the two are algebraically equal.
    """
    r = np.sqrt(L / n)
    if L / n > 0.5:
        warnings.warn("first-order expansion assumes L << n", RuntimeWarning, stacklevel=2)
    s4 = sigma2**2
    return s4 * (1 + 4 * r) / n, s4 * (2 * (1 + 2 * r) - 1) / n


def edge_variances(L: int, n: int, sigma2: float = 1.0) -> tuple[float, float]:
    """Exact-formula variances evaluated at ``lambda_d = sigma2 (1 + sqrt(L/n))^2``."""
    lam = sigma2 * (1 + np.sqrt(L / n)) ** 2
    return lam**2 / n, (2 * lam * sigma2 - sigma2**2) / n
