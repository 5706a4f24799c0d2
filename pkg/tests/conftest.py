import numpy as np
import pytest

from markov_scope import _accel, divisibility, linalg
from markov_scope.channels import WeightedKrausMap

BACKENDS = ["numpy"] + (["numba"] if _accel.HAVE_NUMBA else [])


@pytest.fixture(params=BACKENDS)
def backend(request, monkeypatch):
    """Run a test once per kernel backend."""
    use = request.param == "numba"
    monkeypatch.setattr(linalg, "USE_NUMBA", use)
    monkeypatch.setattr(divisibility, "USE_NUMBA", use)
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_unitary(rng, n=2):
    z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_hermitian(rng, n=4):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (a + a.conj().T) / 2


def random_kraus_map(rng, n_terms=None):
    k = n_terms or int(rng.integers(1, 5))
    w = rng.random(k)
    return WeightedKrausMap(w / w.sum(), np.stack([random_unitary(rng) for _ in range(k)]))


def random_density(rng, n=4, rank=None):
    rank = rank or n
    a = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real
