import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_hermitian(rng, d):
    x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (x + x.conj().T) / 2.0


def random_dichotomic(rng, d):
    w, v = np.linalg.eigh(random_hermitian(rng, d))
    signs = np.where(rng.normal(size=d) >= 0.0, 1.0, -1.0)
    return (v * signs) @ v.conj().T


def random_density(rng, d):
    x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    r = x @ x.conj().T
    return r / r.trace().real


def random_unit_axis(rng):
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)
