"""Array geometry, source configuration and the population covariance."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .numerics import hermitian_eigvals

STOCHASTIC = "stochastic"
DETERMINISTIC = "deterministic"
MODELS = (STOCHASTIC, DETERMINISTIC)


@dataclass(frozen=True)
class ArrayConfig:
    """Uniform linear array with half-wavelength spacing."""

    L: int

    def __post_init__(self):
        if int(self.L) != self.L or self.L < 2:
            raise ValueError(f"need at least 2 sensors, got L={self.L}")


@dataclass(frozen=True)
class SourceSet:
    """Uncorrelated narrowband sources: DOAs in degrees and powers (diag of P)."""

    doas: tuple[float, ...] = ()
    powers: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "doas", tuple(float(t) for t in self.doas))
        object.__setattr__(self, "powers", tuple(float(p) for p in self.powers))
        if len(self.doas) != len(self.powers):
            raise ValueError("doas and powers must have the same length")
        if any(abs(t) >= 90 for t in self.doas):
            raise ValueError("DOAs must satisfy |theta| < 90 degrees")
        if len(set(self.doas)) != len(self.doas):
            raise ValueError("DOAs must be pairwise distinct")
        if any(not p > 0 for p in self.powers):
            raise ValueError("source powers must be positive")

    @property
    def d(self) -> int:
        return len(self.doas)

    @classmethod
    def equal_power(cls, doas: Sequence[float], snr_db: float, noise_var: float = 1.0):
        p = snr_to_power(snr_db, noise_var)
        return cls(tuple(doas), (p,) * len(doas))


@dataclass(frozen=True)
class Scenario:
    array: ArrayConfig
    sources: SourceSet
    n: int
    noise_var: float = 1.0
    model: str = STOCHASTIC

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"snapshot count must be positive, got n={self.n}")
        if not self.noise_var > 0:
            raise ValueError("noise variance must be positive")
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}, got {self.model!r}")
        if self.sources.d >= self.array.L:
            raise ValueError("need fewer sources than sensors")

    @property
    def L(self) -> int:
        return self.array.L

    @property
    def d(self) -> int:
        return self.sources.d

    def with_snr(self, snr_db: float) -> "Scenario":
        """Same geometry with every source at ``snr_db``."""
        src = SourceSet.equal_power(self.sources.doas, snr_db, self.noise_var)
        return replace(self, sources=src)


def make_scenario(L, n, doas=(), snr_db=0.0, noise_var=1.0, model=STOCHASTIC) -> Scenario:
    return Scenario(ArrayConfig(L), SourceSet.equal_power(doas, snr_db, noise_var), n, noise_var, model)


@dataclass(frozen=True)
class PopulationSpectrum:
    """Eigenvalues of the population covariance, descending.

    ``d`` is the number of eigenvalues strictly above ``sigma2``; when not
    given it is inferred with a 1e-9 relative margin.
    """

    lambdas: np.ndarray
    sigma2: float = 1.0
    d: int = field(default=-1)

    def __post_init__(self):
        lam = np.sort(np.asarray(self.lambdas, dtype=float))[::-1]
        object.__setattr__(self, "lambdas", lam)
        if self.d < 0:
            object.__setattr__(self, "d", int(np.sum(lam > self.sigma2 * (1 + 1e-9))))

    @property
    def L(self) -> int:
        return self.lambdas.size

    @property
    def signal(self) -> np.ndarray:
        return self.lambdas[: self.d]


def snr_to_power(snr_db: float, noise_var: float = 1.0) -> float:
    return noise_var * 10.0 ** (snr_db / 10.0)


def power_to_snr(power: float, noise_var: float = 1.0) -> float:
    return 10.0 * np.log10(power / noise_var)


def steering_vector(theta_deg: float, L: int) -> np.ndarray:
    """ULA response ``exp(j*pi*k*sin(theta))`` for ``k = 0..L-1``."""
    if abs(theta_deg) >= 90:
        raise ValueError(f"|theta| must be below 90 degrees, got {theta_deg}")
    k = np.arange(L)
    return np.exp(1j * np.pi * k * np.sin(np.deg2rad(theta_deg)))


def steering_matrix(doas: Sequence[float], L: int) -> np.ndarray:
    if len(doas) == 0:
        return np.zeros((L, 0), dtype=complex)
    return np.stack([steering_vector(t, L) for t in doas], axis=1)


def population_covariance(s: Scenario) -> np.ndarray:
    """``R = A P A^H + sigma^2 I``; the same for both signal models."""
    A = steering_matrix(s.sources.doas, s.L)
    P = np.asarray(s.sources.powers)
    R = (A * P) @ A.conj().T + s.noise_var * np.eye(s.L)
    return 0.5 * (R + R.conj().T)


def population_spectrum(s: Scenario) -> PopulationSpectrum:
    lam = hermitian_eigvals(population_covariance(s))
    # Noise eigenvalues are exactly sigma^2 in exact arithmetic; snap the
    # rounding residue so downstream bias terms see exact equality.
    lam = lam.copy()
    lam[s.d :] = s.noise_var
    return PopulationSpectrum(lam, s.noise_var, s.d)
