"""Monte Carlo checks of every closed-form eigenvalue statistic."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.integrate import quad

from ..eigstats import (
    MpLaw,
    brillinger_cov,
    deterministic_eig_moments,
    mp_cdf,
    mp_density,
    perturbation_coeff_var,
    stochastic_eig_moments,
    tw_largest_moments,
    variance_equivalence,
)
from ..enumerator import estimate_d_batch
from ..numerics import NS_VALIDATION, RngStream, hermitian_eigvals, sample_circular_gaussian
from ..scenario import PopulationSpectrum, SourceSet
from ..simulator import deterministic_source_matrix, sample_covariance

SE_GATE = 4.0
VALIDATION_BLOCK = 5000


@dataclass
class Check:
    name: str
    oracle: str
    statistic: float
    expected: float
    tolerance: float
    passed: bool
    sample_size: int
    detail: str = ""


@dataclass
class ValidationReport:
    seed: int
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        return check

    def to_text(self) -> str:
        lines = [f"validation suite, seed={self.seed}"]
        for c in self.checks:
            verdict = "PASS" if c.passed else "FAIL"
            lines.append(
                f"[{verdict}] {c.name}: statistic={c.statistic:.6g} expected={c.expected:.6g} "
                f"tol={c.tolerance:.3g} N={c.sample_size} ({c.oracle}){' ' + c.detail if c.detail else ''}"
            )
        lines.append(f"{sum(c.passed for c in self.checks)}/{len(self.checks)} checks passed")
        return "\n".join(lines)

    def to_json(self) -> str:
        return json.dumps({"seed": self.seed, "passed": self.passed,
                           "checks": [asdict(c) for c in self.checks]}, indent=2)


def _blocks(total: int, seed: int, tag: int):
    """Yield ``(generator, size)`` blocks; block streams are keyed by ``tag``."""
    for b, start in enumerate(range(0, total, VALIDATION_BLOCK)):
        g = RngStream(seed, tag * 1_000_003 + b, NS_VALIDATION).generator()
        yield g, min(VALIDATION_BLOCK, total - start)


def _mean_gate(name, oracle, samples, expected) -> Check:
    samples = np.asarray(samples)
    N = samples.size
    se = samples.std(ddof=1) / np.sqrt(N)
    m = samples.mean()
    return Check(name, oracle, float(m), float(expected), SE_GATE * float(se),
                 bool(abs(m - expected) <= SE_GATE * se), N, f"z={(m - expected) / se:+.2f}")


def _var_gate(name, oracle, samples, expected) -> Check:
    samples = np.asarray(samples, dtype=float)
    N = samples.size
    c = samples - samples.mean()
    v = np.mean(c**2) * N / (N - 1)
    se = np.sqrt(max(np.mean(c**4) - np.mean(c**2) ** 2, 0.0) / N)
    return Check(name, oracle, float(v), float(expected), SE_GATE * float(se),
                 bool(abs(v - expected) <= SE_GATE * se), N, f"z={(v - expected) / se:+.2f}")


def _complex_cov_gate(name, oracle, a, b, expected) -> list[Check]:
    """Gate real and imaginary parts of ``E[(a-Ea) conj(b-Eb)]`` separately."""
    z = (a - a.mean()) * np.conj(b - b.mean())
    checks = []
    for part, vals, target in (("re", z.real, expected.real), ("im", z.imag, expected.imag)):
        checks.append(_mean_gate(f"{name}[{part}]", oracle, vals, target))
    return checks


def check_noncentral_zero_mean(report: ValidationReport, seed: int) -> None:
    g = RngStream(seed, 0, NS_VALIDATION).generator()
    L, n = 4, 20
    vecs = [sample_circular_gaussian(np.zeros(L), 1.0, g) for _ in range(4)]
    B = sample_circular_gaussian(np.zeros((L, L)), 1.0, g)
    Sigma = B @ B.conj().T + np.eye(L)
    alpha, beta, gamma, zeta = vecs
    plain = (alpha.conj() @ Sigma @ gamma) * (zeta.conj() @ Sigma @ beta) / n
    got = brillinger_cov(alpha, beta, gamma, zeta, Sigma, n, mu=np.zeros((L, n)))
    err = abs(got - plain)
    report.add(Check("noncentral_cov_zero_mean", "exact reduction to the central formula",
                     float(err), 0.0, 1e-12 * abs(plain), bool(err <= 1e-12 * abs(plain)), 1))


def check_noncentral_mc(report: ValidationReport, seed: int, draws: int) -> None:
    g = RngStream(seed, 1, NS_VALIDATION).generator()
    L, n = 4, 20
    alpha, beta, gamma, zeta = (sample_circular_gaussian(np.zeros(L), 1.0, g) for _ in range(4))
    B = sample_circular_gaussian(np.zeros((L, L)), 1.0, g)
    Sigma = B @ B.conj().T / L + 0.5 * np.eye(L)
    mu = sample_circular_gaussian(np.zeros((L, n)), 1.0, g)
    C = np.linalg.cholesky(Sigma)
    expected = brillinger_cov(alpha, beta, gamma, zeta, Sigma, n, mu=mu)
    a_all, b_all = [], []
    for gb, size in _blocks(draws, seed, 11):
        W = sample_circular_gaussian(np.zeros((size, L, n)), 1.0, gb)
        R = sample_covariance(mu + C @ W)
        a_all.append(np.einsum("i,tij,j->t", alpha.conj(), R, beta))
        b_all.append(np.einsum("i,tij,j->t", gamma.conj(), R, zeta))
    report.checks.extend(_complex_cov_gate(
        "noncentral_cov_mc", "MC covariance of bilinear forms",
        np.concatenate(a_all), np.concatenate(b_all), expected))


def _moment_draws(seed: int, draws: int, deterministic: bool, L=4, n=200):
    lam = np.array([3.0, 1.0, 1.0, 1.0])[:L]
    mu = None
    if deterministic:
        unit = RngStream(seed, 2, NS_VALIDATION)
        S = deterministic_source_matrix(SourceSet((0.0,), (lam[0] - 1.0,)), n, unit)
        mu = np.zeros((L, n), dtype=complex)
        mu[0] = S[0]
    l1, r21, r31 = [], [], []
    for gb, size in _blocks(draws, seed, 21 if deterministic else 22):
        W = sample_circular_gaussian(np.zeros((size, L, n)), 1.0, gb)
        X = mu + W if deterministic else np.sqrt(lam)[:, None] * W
        R = sample_covariance(X)
        l1.append(hermitian_eigvals(R)[:, 0])
        r21.append(R[:, 1, 0])
        r31.append(R[:, 2, 0])
    return PopulationSpectrum(lam, 1.0, 1), n, np.concatenate(l1), np.concatenate(r21), np.concatenate(r31)


def check_eig_moments(report: ValidationReport, seed: int, draws: int) -> None:
    spec, n, l1, _, _ = _moment_draws(seed, draws, deterministic=False)
    mom = stochastic_eig_moments(spec, n)
    report.add(_mean_gate("stochastic_mean_l1", "MC sample mean", l1, mom.means[0]))
    report.add(_var_gate("stochastic_var_l1", "MC sample variance", l1, mom.variances[0]))

    spec, n, l1, r21, r31 = _moment_draws(seed, draws, deterministic=True)
    mom = deterministic_eig_moments(spec, n)
    report.add(_mean_gate("deterministic_mean_l1", "MC sample mean", l1, mom.means[0]))
    report.add(_var_gate("deterministic_var_l1", "MC sample variance", l1, mom.variances[0]))

    # Diagonal R: eigenvectors are the unit vectors, so t_1k = R_hat[k, 1] / (lambda_1 - lambda_k).
    lam = spec.lambdas
    t12 = r21 / (lam[0] - lam[1])
    t13 = r31 / (lam[0] - lam[2])
    report.add(_mean_gate("perturbation_var_t12", "MC variance of the mixing weight",
                          np.abs(t12 - t12.mean()) ** 2, perturbation_coeff_var(spec, n, 0, 1)))
    report.checks.extend(_complex_cov_gate("perturbation_cov_t12_t13", "MC cross-covariance", t12, t13, 0j))


def check_marchenko_pastur(report: ValidationReport, seed: int, trials: int) -> None:
    for gamma in (1.0, 2.0, 4.0, 10.0):
        law = MpLaw(gamma)
        total, _ = quad(lambda x: mp_density(x, law), law.a, law.b, limit=200, epsabs=1e-12, epsrel=1e-12)
        report.add(Check(f"mp_integral_gamma{gamma:g}", "adaptive quadrature", total, 1.0, 1e-6,
                         bool(abs(total - 1) <= 1e-6), 1))
    L, n = 100, 400
    eigs = []
    for gb, size in _blocks(trials, seed, 31):
        for _ in range(size):
            W = sample_circular_gaussian(np.zeros((L, n)), 1.0, gb)
            eigs.append(hermitian_eigvals(sample_covariance(W)))
    x = np.sort(np.concatenate(eigs))
    F = mp_cdf(x, MpLaw(n / L))
    N = x.size
    ks = max(np.max(np.arange(1, N + 1) / N - F), np.max(F - np.arange(N) / N))
    report.add(Check("mp_null_ks", "Kolmogorov-Smirnov distance to integrated density",
                     float(ks), 0.0, 0.05, bool(ks <= 0.05), N))


def check_tracy_widom(report: ValidationReport, seed: int, trials: int, L=10, n=100) -> None:
    mean, std = tw_largest_moments(n, L)
    l1 = []
    for gb, size in _blocks(trials, seed, 41):
        W = sample_circular_gaussian(np.zeros((size, L, n)), 1.0, gb)
        l1.append(hermitian_eigvals(sample_covariance(W))[:, 0])
    l1 = np.concatenate(l1)
    for name, got, want in (("tw_mean_l1", l1.mean(), mean), ("tw_std_l1", l1.std(ddof=1), std)):
        rel = abs(got - want) / want
        report.add(Check(name, "null-case MC, 5% relative", float(got), want, 0.05 * want,
                         bool(rel <= 0.05), l1.size, f"rel={rel:.4f}"))


def check_variance_equivalence(report: ValidationReport, seed: int, count: int = 1000) -> None:
    g = RngStream(seed, 5, NS_VALIDATION).generator()
    worst = 0.0
    for _ in range(count):
        n = int(g.integers(4, 5000))
        L = int(g.integers(2, n // 2 + 1))
        s2 = float(g.uniform(0.01, 100.0))
        v_sto, v_det = variance_equivalence(L, n, s2)
        worst = max(worst, abs(v_sto - v_det) / abs(v_sto))
    report.add(Check("variance_equivalence", "first-order identity at the bulk edge", worst, 0.0,
                     1e-15, bool(worst <= 1e-15), count))


def check_null_false_alarm(report: ValidationReport, seed: int, trials: int, L=3, n=30) -> float:
    d_hat = []
    for gb, size in _blocks(trials, seed, 51):
        W = sample_circular_gaussian(np.zeros((size, L, n)), 1.0, gb)
        d_hat.append(estimate_d_batch(hermitian_eigvals(sample_covariance(W)), n))
    rate = float(np.mean(np.concatenate(d_hat) > 0))
    report.add(Check("null_false_alarm", "empirical over-estimation rate, band [0.001, 0.008]",
                     rate, 0.003, 0.005, bool(0.001 <= rate <= 0.008), trials))
    return rate


def validate_suite(seed: int = 0, scale: float = 1.0) -> ValidationReport:
    """Run every formula-vs-Monte-Carlo check; ``scale`` shrinks sample sizes."""

    def size(k):
        return max(200, int(round(k * scale)))

    report = ValidationReport(seed)
    check_noncentral_zero_mean(report, seed)
    check_noncentral_mc(report, seed, size(100_000))
    check_eig_moments(report, seed, size(100_000))
    check_marchenko_pastur(report, seed, max(20, int(round(200 * scale))))
    check_tracy_widom(report, seed, size(10_000))
    check_variance_equivalence(report, seed)
    check_null_false_alarm(report, seed, size(20_000))
    return report
