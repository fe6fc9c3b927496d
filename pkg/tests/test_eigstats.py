import warnings
from fractions import Fraction

import numpy as np
import pytest
from scipy.integrate import quad

from mdlperf.eigstats import (
    IllConditionedWarning,
    MpLaw,
    brillinger_cov,
    deterministic_eig_moments,
    edge_variances,
    mp_cdf,
    mp_density,
    stochastic_eig_moments,
    tw_largest_moments,
    variance_equivalence,
)
from mdlperf.harness.validation import ValidationReport, check_noncentral_mc, check_eig_moments
from mdlperf.numerics import gaussian_q
from mdlperf.scenario import PopulationSpectrum


def test_brillinger_zero_mean_reduction(rng):
    L, n = 3, 15
    vecs = [rng.standard_normal(L) + 1j * rng.standard_normal(L) for _ in range(4)]
    B = rng.standard_normal((L, L)) + 1j * rng.standard_normal((L, L))
    Sigma = B @ B.conj().T
    a, b, g, z = vecs
    expected = (a.conj() @ Sigma @ g) * (z.conj() @ Sigma @ b) / n
    assert brillinger_cov(a, b, g, z, Sigma, n) == pytest.approx(expected, rel=1e-14)
    assert brillinger_cov(a, b, g, z, Sigma, n, mu=np.zeros((L, n))) == pytest.approx(expected, rel=1e-14)


def test_brillinger_unit_vectors():
    e1 = np.array([1.0, 0, 0])
    assert brillinger_cov(e1, e1, e1, e1, np.eye(3), 8) == pytest.approx(1 / 8)


def test_brillinger_dimension_mismatch():
    with pytest.raises(ValueError):
        brillinger_cov(np.ones(2), np.ones(3), np.ones(3), np.ones(3), np.eye(3), 4)
    with pytest.raises(ValueError):
        brillinger_cov(np.ones(3), np.ones(3), np.ones(3), np.ones(3), np.eye(3), 4, mu=np.zeros((3, 5)))


def test_brillinger_noncentral_mc():
    report = ValidationReport(0)
    check_noncentral_mc(report, seed=3, draws=20_000)
    assert report.passed, report.to_text()


def _single(lam1, L=10, s2=1.0):
    return PopulationSpectrum(np.r_[lam1, np.full(L - 1, s2)], s2, 1)


def test_single_source_bias_specialisation():
    lam1, L, n = 4.0, 8, 50
    mom = stochastic_eig_moments(_single(lam1, L), n)
    assert mom.means[0] == pytest.approx(lam1 + (L - 1) * lam1 / (n * (lam1 - 1)), rel=1e-14)
    assert np.all(np.isnan(mom.means[1:]))


def test_worked_example_values():
    mom = stochastic_eig_moments(_single(1.5), 100)
    assert mom.means[0] == pytest.approx(1.77, rel=1e-12)
    assert mom.stds[0] == pytest.approx(0.15, rel=1e-12)


def test_models_share_single_source_mean():
    for lam1 in (1.3, 2.0, 7.5):
        a = stochastic_eig_moments(_single(lam1), 64).means[0]
        b = deterministic_eig_moments(_single(lam1), 64).means[0]
        assert a == pytest.approx(b, rel=1e-14)


def test_noise_bias_terms_identical_on_rationals():
    # ((l + s)s - s^2) / (l - s) == l s / (l - s) term by term.
    for l, s in [(Fraction(3), Fraction(1)), (Fraction(7, 3), Fraction(1, 2)), (Fraction(11, 10), Fraction(1))]:
        assert ((l + s) * s - s * s) / (l - s) == l * s / (l - s)


def test_deterministic_variance_boundary():
    s2, n = 2.0, 40
    lam = s2 * (1 + 1e-4)
    spec = PopulationSpectrum([lam, s2, s2], s2, 1)
    assert deterministic_eig_moments(spec, n).variances[0] == pytest.approx(s2**2 / n, rel=3e-4)
    assert stochastic_eig_moments(spec, n).variances[0] == pytest.approx(s2**2 / n, rel=3e-4)


def test_ill_conditioned_signal_pair():
    spec = PopulationSpectrum([3.0, 3.0, 1.0, 1.0], 1.0, 2)
    with pytest.warns(IllConditionedWarning):
        mom = stochastic_eig_moments(spec, 100)
    assert np.all(np.isnan(mom.means))


@pytest.mark.slow
def test_eig_moments_mc():
    report = ValidationReport(0)
    check_eig_moments(report, seed=4, draws=20_000)
    assert report.passed, report.to_text()


@pytest.mark.parametrize("gamma,a,b", [(1.0, 0.0, 4.0), (4.0, 0.25, 2.25)])
def test_mp_support(gamma, a, b):
    law = MpLaw(gamma)
    assert law.a == pytest.approx(a) and law.b == pytest.approx(b)


@pytest.mark.parametrize("gamma", [1.0, 2.0, 4.0, 10.0, 37.5])
def test_mp_density_normalised(gamma):
    law = MpLaw(gamma)
    total, _ = quad(lambda x: mp_density(x, law), law.a, law.b, limit=200, epsabs=1e-12, epsrel=1e-12)
    assert total == pytest.approx(1.0, abs=1e-6)
    assert mp_density(law.b + 0.1, law) == 0.0
    assert np.all(mp_density(np.linspace(-1, 6, 400), law) >= 0)


@pytest.mark.parametrize("gamma", [1.0, 4.0])
def test_mp_cdf_matches_quadrature(gamma):
    law = MpLaw(gamma)
    xs = np.linspace(law.a, law.b, 9)[1:-1]
    for x in xs:
        ref, _ = quad(lambda t: mp_density(t, law), law.a, x, limit=200)
        assert mp_cdf(x, law) == pytest.approx(ref, abs=1e-6)
    assert mp_cdf(law.b + 1, law) == 1.0 and mp_cdf(law.a - 1, law) == 0.0


def test_tw_worked_example():
    mean, std = tw_largest_moments(100, 10)
    assert mean == pytest.approx(1.556, abs=0.01)
    assert std == pytest.approx(0.0885, abs=0.002)
    assert gaussian_q((1.3 - mean) / std) > 0.99


def test_variance_equivalence_values():
    sto, det = variance_equivalence(10, 100, 1.0)
    assert sto == pytest.approx(0.02264911064067352, rel=1e-14)
    assert sto == pytest.approx(det, rel=1e-15)


def test_variance_equivalence_warns_for_large_ratio():
    with pytest.warns(RuntimeWarning):
        variance_equivalence(60, 100)


def test_exact_edge_variances_differ_at_second_order():
    # lambda^2 = (1+r)^4 and 2(1+r)^2 - 1 differ from 1 + 4r by 6r^2 and 2r^2 to leading order.
    for r in (1e-2, 3e-3, 1e-3):
        n = 1000
        L = r**2 * n
        sto_exact, det_exact = edge_variances(L, n)
        approx, _ = variance_equivalence(L, n)
        assert (sto_exact - approx) * n / r**2 == pytest.approx(6.0, rel=5 * r)
        assert (det_exact - approx) * n / r**2 == pytest.approx(2.0, abs=1e-6)


def test_moments_finite_for_signal_indices():
    spec = PopulationSpectrum([9.0, 5.0, 2.0, 1.0, 1.0, 1.0], 1.0)
    assert spec.d == 3
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        for fn in (stochastic_eig_moments, deterministic_eig_moments):
            mom = fn(spec, 200)
            assert np.all(np.isfinite(mom.means[:3])) and np.all(mom.variances[:3] > 0)
