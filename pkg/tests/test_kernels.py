"""The numba and numpy kernel paths must agree with each other and with LAPACK."""
import numpy as np
import pytest

from markov_scope import _accel, _kernels

from conftest import random_hermitian

needs_numba = pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba not installed")


def _stack(rng, k=300):
    return np.stack([random_hermitian(rng) for _ in range(k)])


def test_numpy_eigh_matches_lapack(rng):
    h = _stack(rng)
    w, v = _kernels.batch_eigh_np(h, want_vectors=True)
    assert np.abs(w - np.linalg.eigvalsh(h)).max() < 1e-12
    recon = v @ (w[..., None] * np.conj(np.swapaxes(v, 1, 2)))
    assert np.abs(recon - h).max() < 1e-12


def test_numpy_eigh_degenerate():
    d = np.zeros((2, 4, 4), complex)
    d[0] = np.diag([0, 0, 2, 1])
    d[1] = np.eye(4)
    w = _kernels.batch_eigvalsh_np(d)
    assert np.array_equal(w, [[0, 0, 1, 2], [1, 1, 1, 1]])


def test_numpy_inverse_matches_lapack(rng):
    m = rng.normal(size=(300, 4, 4)) + 1j * rng.normal(size=(300, 4, 4))
    inv, ok = _kernels.batch_inverse_np(m, 1e-12)
    assert ok.all()
    assert np.abs(inv - np.linalg.inv(m)).max() < 1e-10


def test_numpy_inverse_flags_only_singular_members(rng):
    m = rng.normal(size=(3, 4, 4)) + 0j
    m[1] = np.diag([1, 0, 0, 1])
    inv, ok = _kernels.batch_inverse_np(m, 1e-12)
    assert ok.tolist() == [True, False, True]
    assert np.abs(inv[[0, 2]] - np.linalg.inv(m[[0, 2]])).max() < 1e-10


def test_reshuffle_agrees_with_loop(rng):
    phi = rng.normal(size=(5, 4, 4)) + 1j * rng.normal(size=(5, 4, 4))
    fast = _kernels.choi_reshuffle_np(phi, 2)
    for k in range(5):
        assert np.array_equal(fast[k], _kernels._choi_reshuffle(phi[k], 2))


@needs_numba
def test_backends_agree_on_eigenvalues(rng):
    h = _stack(rng, 1000)
    assert np.abs(_kernels.batch_eigvalsh_nb(h) - _kernels.batch_eigvalsh_np(h)).max() < 1e-12


@needs_numba
def test_backends_agree_on_vectors(rng):
    h = random_hermitian(rng)
    w_nb, v_nb = _kernels.jacobi_eigh_nb(h, True)
    w_np, v_np = _kernels.batch_eigh_np(h[None], True)
    # eigenvectors agree up to a phase per column
    overlap = np.abs(np.sum(np.conj(v_nb) * v_np[0], axis=0))
    assert np.abs(overlap - 1).max() < 1e-10
    assert np.abs(w_nb - w_np[0]).max() < 1e-12


@needs_numba
def test_backends_agree_on_inverse(rng):
    m = rng.normal(size=(500, 4, 4)) + 1j * rng.normal(size=(500, 4, 4))
    m[7] = np.diag([1, 1e-14, 1, 1])
    a, ok_a = _kernels.batch_inverse_nb(m, 1e-12)
    b, ok_b = _kernels.batch_inverse_np(m, 1e-12)
    assert np.array_equal(ok_a, ok_b)
    assert not ok_a[7]
    assert np.abs(a[ok_a] - b[ok_b]).max() < 1e-10


@needs_numba
def test_backends_agree_on_propagator_spectra(rng):
    phis = rng.normal(size=(20, 4, 4)) + 1j * rng.normal(size=(20, 4, 4))
    # make the Choi matrices Hermitian: Phi = sum_k w_k U (x) conj(U)
    from conftest import random_unitary

    for k in range(20):
        us = [random_unitary(rng) for _ in range(3)]
        w = rng.random(3)
        phis[k] = sum(wi * np.kron(u, u.conj()) for wi, u in zip(w / w.sum(), us))
    invs = np.linalg.inv(phis)
    t_idx, s_idx = np.tril_indices(20, k=-1)
    a, ra = _kernels.propagator_choi_eigvals_nb(phis, invs, t_idx.astype(np.int64),
                                                s_idx.astype(np.int64), 2)
    b, rb = _kernels.propagator_choi_eigvals_np(phis, invs, t_idx, s_idx, 2)
    assert np.abs(a - b).max() < 1e-10
    assert np.abs(ra - rb).max() < 1e-10
