import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_hermitian(rng, L, scale=1.0):
    B = rng.standard_normal((L, L)) + 1j * rng.standard_normal((L, L))
    return scale * (B + B.conj().T) / 2
