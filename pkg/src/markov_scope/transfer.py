"""Transfer matrices and Choi matrices in the unit-matrix basis.

The operator basis is ``G_a = |k><l|`` with ``a = k * n + l``. In that basis
the transfer matrix ``Phi[a, b] = Tr(G_a^dagger L(G_b))`` has column ``b`` equal
to the row-major flattening of ``L(G_b)``, map composition is matrix
multiplication, and the Choi matrix is

    W = (1/n) * sum_{a,b} Phi[a, b] * kron(G_b, G_a)

which equals ``(1 (x) L)(P+)`` for the unit-trace maximally entangled state
``P+ = (1/n) sum_{kl} |kk><ll|``.
"""
import numpy as np

from . import _kernels
from .linalg import (
    DEFAULT_SINGULARITY_THRESHOLD,
    SingularMatrixError,
    as_matrix,
    hermiticity_residual,
    inverse,
    kron,
)

CHOI_HERMITICITY_LIMIT = 1e-6


class NumericalCorruptionError(ArithmeticError):
    """A Choi matrix came out grossly non-Hermitian."""


class NotInvertibleError(SingularMatrixError):
    """``Phi(s)`` has no inverse, so the propagator from ``s`` is undefined."""

    def __init__(self, s, pivot_threshold):
        ArithmeticError.__init__(self, f"transfer matrix at s={s!r} is not invertible")
        self.s = s
        self.pivot_threshold = pivot_threshold


def unit_basis(n):
    """Stack of the ``n*n`` matrix units ``|k><l|`` in row-major order."""
    return np.eye(n * n, dtype=np.complex128).reshape(n * n, n, n)


def maximally_entangled(n=2):
    """``P+`` with unit trace."""
    v = np.eye(n, dtype=np.complex128).reshape(n * n) / np.sqrt(n)
    return np.outer(v, v.conj())


def transfer_from_map(kraus_map):
    """``Phi[a, b] = Tr(G_a^dagger L(G_b))`` evaluated term by term."""
    n = kraus_map.dim
    basis = unit_basis(n)
    phi = np.empty((n * n, n * n), dtype=np.complex128)
    for b, g_b in enumerate(basis):
        out = kraus_map.apply(g_b)
        for a, g_a in enumerate(basis):
            phi[a, b] = np.trace(np.conj(g_a.T) @ out)
    return phi


def transfer_from_unitaries(weights, operators):
    """Closed form ``sum_k w_k kron(U_k, conj(U_k))``; vectorised twin of
    :func:`transfer_from_map` used by the sweeps."""
    ops = np.asarray(operators, dtype=np.complex128)
    n = ops.shape[-1]
    s = np.einsum("...kij,...klm->...kiljm", ops, np.conj(ops))
    s = s.reshape(ops.shape[:-2] + (n * n, n * n))
    return np.einsum("...k,...kab->...ab", np.asarray(weights), s)


def _checked_choi(w):
    resid = hermiticity_residual(w)
    if resid > CHOI_HERMITICITY_LIMIT:
        raise NumericalCorruptionError(f"Choi hermiticity residual {resid:.3e}")
    return 0.5 * (w + np.conj(w.T))


def choi_from_transfer(phi):
    """Choi matrix from a transfer matrix, summed basis term by basis term."""
    phi = as_matrix(phi)
    d = phi.shape[0]
    n = int(round(np.sqrt(d)))
    if n * n != d or phi.shape != (d, d):
        raise ValueError(f"transfer matrix must be n^2 x n^2, got {phi.shape}")
    basis = unit_basis(n)
    w = np.zeros((d, d), dtype=np.complex128)
    for a in range(d):
        for b in range(d):
            if phi[a, b] != 0:
                w += phi[a, b] * kron(basis[b], basis[a])
    return _checked_choi(w / n)


def choi_reshuffle(phi):
    """Index-permutation form of :func:`choi_from_transfer` (no symmetrisation)."""
    phi = as_matrix(phi)
    n = int(round(np.sqrt(phi.shape[0])))
    return _kernels.choi_reshuffle_np(phi[None], n)[0]


def choi_from_kraus_direct(kraus_map):
    """``(1 (x) L)(P+)`` built block by block: block ``(k, l)`` is ``L(|k><l|) / n``."""
    n = kraus_map.dim
    w = np.zeros((n * n, n * n), dtype=np.complex128)
    for k in range(n):
        for l in range(n):
            e_kl = np.zeros((n, n), dtype=np.complex128)
            e_kl[k, l] = 1.0
            w[k * n:(k + 1) * n, l * n:(l + 1) * n] = kraus_map.apply(e_kl) / n
    return _checked_choi(w)


def propagator_transfer(phi_t, phi_s, singularity_threshold=DEFAULT_SINGULARITY_THRESHOLD, s=None):
    """``Phi(t) @ inverse(Phi(s))``.

    :raises NotInvertibleError: if ``Phi(s)`` is singular.
    """
    phi_t, phi_s = as_matrix(phi_t), as_matrix(phi_s)
    if phi_t.shape != phi_s.shape:
        raise ValueError("transfer matrices differ in shape")
    try:
        inv = inverse(phi_s, singularity_threshold)
    except SingularMatrixError:
        raise NotInvertibleError(s, singularity_threshold) from None
    return phi_t @ inv


def partial_trace(w, n=2, keep=0):
    """Partial trace of an ``n^2 x n^2`` matrix, keeping factor ``keep`` (0 or 1)."""
    t = as_matrix(w).reshape(n, n, n, n)
    if keep == 0:
        return np.einsum("ijkj->ik", t)
    return np.einsum("jijk->ik", t)
