"""Analytic probability of missed detection for the MDL estimator.

Under ``H_d`` the estimator misses a source when ``Lambda(d-1) < Lambda(d)``.
After the arithmetic/geometric mean of the spectrum tail is rewritten in
terms of ``x = l_d / a_d`` the event becomes ``log Q(x) < T``, and because
``log Q`` increases for ``x > 1`` this is ``x < T_x`` with ``T_x`` the
solution of ``log Q(T_x) = T``.  ``x`` is modelled as Gaussian with the
O(1/n)-biased moments of ``l_d`` and ``a_d``.

For ``d > 2`` the threshold, ``Q`` and moment formulas are the natural
extension of the one- and two-source expressions (``m = L - d + 1`` tail
eigenvalues); they are validated by Monte Carlo only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .numerics import gaussian_q
from .scenario import DETERMINISTIC, STOCHASTIC, PopulationSpectrum

NEWTON_TOL = 1e-12
MAX_ITER = 100


class SolverError(RuntimeError):
    """The threshold equation did not converge."""


@dataclass
class ThresholdSolution:
    d: int
    T: float
    T_x: float
    residual: float
    iterations: int


@dataclass
class PmPrediction:
    d: int
    p_m: float
    mu_x: float
    sigma_x: float
    T_x: float
    mean_l: float
    std_l: float
    mean_a: float
    valid: bool = True
    reason: str = ""
    snr_db: float | None = None


def _check_d(d: int, L: int) -> None:
    if not 1 <= d <= L - 2:
        raise ValueError(f"need 1 <= d <= L-2, got d={d}, L={L}")


def threshold_T(d: int, L: int, n: int) -> float:
    """Penalty increment ``(2L - 2d + 1) log(n) / (2n)`` between orders d-1 and d."""
    _check_d(d, L)
    if n < 2:
        raise ValueError("need n >= 2")
    return (2 * L - 2 * d + 1) * math.log(n) / (2 * n)


def log_Q(x: float, d: int, L: int) -> float:
    """``m log(1 + (x-1)/m) - log x`` with ``m = L - d + 1``."""
    if not x > 0:
        raise ValueError("log_Q needs x > 0")
    m = L - d + 1
    return m * math.log1p((x - 1) / m) - math.log(x)


def log_Q_prime(x: float, d: int, L: int) -> float:
    m = L - d + 1
    return (m - 1) * (x - 1) / (x * (m + x - 1))


def solve_threshold_x(d: int, L: int, n: int) -> ThresholdSolution:
    """Solve ``log_Q(T_x) = T`` on ``x > 1``.

    Newton's method from the quadratic approximation ``1 + sqrt(e^{2T} - 1)``,
    kept inside a shrinking bracket; any step that leaves the bracket is
    replaced by a bisection step.
    """
    T = threshold_T(d, L, n)

    def f(x):
        return log_Q(x, d, L) - T

    lo, hi = 1.0, 2.0
    while f(hi) < 0:
        lo, hi = hi, 2 * hi
        if hi > 1e12:
            raise SolverError("could not bracket the threshold")
    x = 1 + math.sqrt(math.expm1(2 * T))
    if not lo < x < hi:
        x = 0.5 * (lo + hi)
    for it in range(1, MAX_ITER + 1):
        fx = f(x)
        if abs(fx) <= NEWTON_TOL:
            return ThresholdSolution(d, T, x, abs(fx), it)
        if fx < 0:
            lo = x
        else:
            hi = x
        dfx = log_Q_prime(x, d, L)
        step = x - fx / dfx if dfx > 0 else math.nan
        x = step if lo < step < hi else 0.5 * (lo + hi)  # NaN fails the test too
    fx = f(x)
    if abs(fx) <= NEWTON_TOL:
        return ThresholdSolution(d, T, x, abs(fx), MAX_ITER)
    raise SolverError(f"threshold solve did not converge (d={d}, L={L}, n={n}, residual={abs(fx):.3e})")


def taylor_threshold_x(d: int, L: int, n: int) -> float:
    """Threshold from the quadratic expansion ``(m-1)/(2m) (x-1)^2`` of log_Q."""
    m = L - d + 1
    return 1 + math.sqrt(2 * m * threshold_T(d, L, n) / (m - 1))


def hypothesis_stats(spectrum: PopulationSpectrum, n: int, d: int | None = None,
                     model: str = STOCHASTIC, bias: bool = True):
    """Mean and std of the weakest signal eigenvalue ``l_d`` and mean of ``a_d``.

    Returns ``(mean_l, std_l, mean_a)``. With ``bias=False`` the plain
    population values ``(lambda_d, std, sigma^2)`` are returned.
    """
    lam, s2 = spectrum.lambdas, spectrum.sigma2
    d = spectrum.d if d is None else d
    L = lam.size
    ld = lam[d - 1]
    strong = lam[: d - 1]
    if model == STOCHASTIC:
        std_l = ld / math.sqrt(n)
    elif model == DETERMINISTIC:
        std_l = math.sqrt(max(2 * ld * s2 - s2**2, 0.0) / n)
    else:
        raise ValueError(f"unknown model {model!r}")
    if not bias:
        return float(ld), float(std_l), float(s2)
    if ld <= s2:
        raise ValueError("weakest signal eigenvalue must exceed the noise power")
    noise_term = (L - d) * ld * s2 / (n * (ld - s2))
    if model == STOCHASTIC:
        signal_term = -sum(lj * ld / (n * (lj - ld)) for lj in strong)
    else:
        signal_term = sum(((ld + lj) * s2 - s2**2) / (n * (ld - lj)) for lj in strong)
    mean_l = ld + noise_term + signal_term
    mean_a = s2 - sum(s2 * lj / (n * (lj - s2)) for lj in lam[:d])
    return float(mean_l), float(std_l), float(mean_a)


def _z_slope(spectrum: PopulationSpectrum, n: int, d: int, model: str, T_x: float) -> float:
    """Derivative of ``(T_x - mu_x) / sigma_x`` along an SNR increase.

    Scaling every source power by ``c`` scales each excess ``lambda_j - sigma^2``
    by ``c``, so the derivative is taken along ``v_j = lambda_j - sigma^2``
    (i.e. with respect to ``log c``).
    """
    lam, s2 = spectrum.lambdas, spectrum.sigma2
    L = lam.size
    ld = lam[d - 1]
    ed = ld - s2
    mean_l, std_l, mean_a = hypothesis_stats(spectrum, n, d, model)
    dM = ed - (L - d) * s2**2 / (n * ed)
    if model == STOCHASTIC:
        dM -= sum((lj * ld - s2 * (lj + ld)) / (n * (lj - ld)) for lj in lam[: d - 1])
        ds = ed / math.sqrt(n)
    else:
        dM += sum(s2**2 / (n * (lj - ld)) for lj in lam[: d - 1])
        ds = s2 * ed / (n * std_l)
    dA = sum(s2**2 / (n * (lj - s2)) for lj in lam[:d])
    return ((T_x * dA - dM) * std_l - (T_x * mean_a - mean_l) * ds) / std_l**2


def pm_predict(spectrum: PopulationSpectrum, n: int, d: int | None = None, *,
               model: str = STOCHASTIC, bias: bool = True, threshold: str = "exact",
               snr_db: float | None = None) -> PmPrediction:
    """Predicted probability that MDL returns fewer than ``d`` sources.

    Outside the region where the first-order expansion is usable the
    prediction is ``p_m = 1`` with ``valid=False``: when ``lambda_d`` does
    not exceed the noise power, when the biased ``E(a_d)`` is not positive,
    or when the standardised threshold stops decreasing as the SNR grows
    (the 1/(lambda_d - sigma^2) bias term blowing up close to the noise
    floor).
    """
    L = spectrum.L
    d = spectrum.d if d is None else d
    _check_d(d, L)
    if threshold == "exact":
        T_x = solve_threshold_x(d, L, n).T_x
    elif threshold == "taylor":
        T_x = taylor_threshold_x(d, L, n)
    else:
        raise ValueError("threshold must be 'exact' or 'taylor'")

    ld, s2 = spectrum.lambdas[d - 1], spectrum.sigma2

    def invalid(reason):
        return PmPrediction(d, 1.0, math.nan, math.nan, T_x, math.nan, math.nan, math.nan,
                            False, reason, snr_db)

    if not ld > s2 * (1 + 1e-12):
        return invalid("lambda_d <= sigma^2")
    mean_l, std_l, mean_a = hypothesis_stats(spectrum, n, d, model, bias)
    if not mean_a > 0:
        return invalid("E(a_d) <= 0")
    if bias and _z_slope(spectrum, n, d, model, T_x) >= 0:
        return invalid("bias expansion not monotone")
    mu_x = mean_l / mean_a
    sigma_x = std_l / mean_a
    p = 1.0 - float(gaussian_q((T_x - mu_x) / sigma_x))
    return PmPrediction(d, min(max(p, 0.0), 1.0), mu_x, sigma_x, T_x, mean_l, std_l, mean_a,
                        True, "", snr_db)


def pm_wang_baseline(spectrum: PopulationSpectrum, n: int, d: int | None = None,
                     snr_db: float | None = None) -> PmPrediction:
    """Reference predictor: quadratic threshold and unbiased eigenvalue moments."""
    return pm_predict(spectrum, n, d, bias=False, threshold="taylor", snr_db=snr_db)


def fishler_mu(lambda_d: float, sigma2: float, L: int, d: int, n: int) -> float:
    """Asymptotic mean of ``Lambda(d-1) - Lambda(d)`` ignoring all eigenvalue biases."""
    if not (lambda_d > 0 and sigma2 > 0):
        raise ValueError("lambda_d and sigma2 must be positive")
    m = L - d + 1
    inner = (sigma2 / lambda_d) * (1 + (lambda_d / sigma2 - 1) / m) ** m
    return n * math.log(inner) + 0.5 * (2 * d - 2 * L - 1) * math.log(n)
