"""Dense complex linear algebra for the small (at most 4x4) matrices used
throughout the package.

Matrices are plain ``numpy`` complex arrays in row-major (C) order. The
eigensolver and the inverse are implemented here (cyclic Jacobi and
Gauss-Jordan with partial pivoting) rather than delegated to LAPACK, so that
pivot-level singularity detection and the Hermitian contract are under our
control.
"""
import numpy as np

from . import _kernels
from ._accel import USE_NUMBA

DEFAULT_SINGULARITY_THRESHOLD = 1e-12
DEFAULT_HERMITICITY_TOL = 1e-8
PSD_CLAMP = 1e-10


class ShapeError(ValueError):
    """Operands have incompatible dimensions."""


class SingularMatrixError(ArithmeticError):
    """Raised by :func:`inverse` when a pivot falls below the threshold."""

    def __init__(self, pivot_threshold):
        super().__init__(f"matrix is singular (pivot below {pivot_threshold:g})")
        self.pivot_threshold = pivot_threshold


class NotHermitianError(ValueError):
    """A Hermitian-only routine received a non-Hermitian matrix."""


class NotPSDError(ValueError):
    """A positive-semidefinite-only routine received a negative eigenvalue."""


def as_matrix(m):
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2:
        raise ShapeError(f"expected a 2-d matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def _square(m):
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {m.shape}")
    return m


def identity(n):
    return np.eye(n, dtype=np.complex128)


def dagger(m):
    """Conjugate transpose."""
    return np.conj(as_matrix(m).T).copy()


def matmul(a, b):
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def kron(a, b):
    """Kronecker product; block ``(i, j)`` of the result is ``a[i, j] * b``."""
    a, b = as_matrix(a), as_matrix(b)
    ra, ca = a.shape
    rb, cb = b.shape
    return (a[:, None, :, None] * b[None, :, None, :]).reshape(ra * rb, ca * cb)


def hermiticity_residual(m):
    m = as_matrix(m)
    return float(np.linalg.norm(m - np.conj(m.T)))


def _eigh(m, want_vectors):
    if USE_NUMBA:
        return _kernels.jacobi_eigh_nb(m, want_vectors)
    w, v = _kernels.batch_eigh_np(m[None], want_vectors)
    return w[0], v[0]


def _checked_hermitian(m, tol):
    m = _square(m)
    resid = hermiticity_residual(m)
    if resid > tol:
        raise NotHermitianError(f"hermiticity residual {resid:.3e} exceeds {tol:g}")
    return 0.5 * (m + np.conj(m.T))


def inverse(m, singularity_threshold=DEFAULT_SINGULARITY_THRESHOLD):
    """Invert a square matrix by Gauss-Jordan elimination.

    :raises SingularMatrixError: if the largest available pivot in some column
        is smaller than ``singularity_threshold`` in magnitude.
    """
    m = _square(m)
    if USE_NUMBA:
        inv, ok = _kernels.gauss_jordan_inverse_nb(m, singularity_threshold)
    else:
        inv, ok = _kernels.batch_inverse_np(m[None], singularity_threshold)
        inv, ok = inv[0], bool(ok[0])
    if not ok:
        raise SingularMatrixError(singularity_threshold)
    return inv


def hermitian_eigh(m, hermiticity_tol=DEFAULT_HERMITICITY_TOL):
    """Ascending eigenvalues and matching eigenvector columns of a Hermitian matrix."""
    h = _checked_hermitian(m, hermiticity_tol)
    w, v = _eigh(h, True)
    return np.asarray(w), np.asarray(v)


def hermitian_eigenvalues(m, hermiticity_tol=DEFAULT_HERMITICITY_TOL):
    """Ascending real eigenvalues of ``m``.

    ``m`` is symmetrised as ``(m + m^dagger)/2`` before solving, after checking
    that the Frobenius norm of ``m - m^dagger`` is within ``hermiticity_tol``.
    """
    h = _checked_hermitian(m, hermiticity_tol)
    return np.asarray(_eigh(h, False)[0])


def _resolution(w):
    # eigenvalues below this are indistinguishable from zero for Jacobi
    return 64 * np.finfo(float).eps * max(1.0, float(np.max(np.abs(w))))


def psd_sqrt(m, hermiticity_tol=DEFAULT_HERMITICITY_TOL):
    """Principal square root of a positive semidefinite matrix.

    Eigenvalues in ``[-1e-10, 0)`` are treated as round-off and clamped to 0.
    """
    w, v = hermitian_eigh(m, hermiticity_tol)
    if w[0] < -PSD_CLAMP:
        raise NotPSDError(f"eigenvalue {w[0]:.3e} is below -{PSD_CLAMP:g}")
    w = np.where(w <= _resolution(w), 0.0, w)
    root = (v * np.sqrt(w)) @ np.conj(v.T)
    return 0.5 * (root + np.conj(root.T))


def exp_i_theta_hermitian(g, theta, hermiticity_tol=1e-10):
    """``exp(i * theta * g)`` for Hermitian ``g`` via its eigendecomposition."""
    w, v = hermitian_eigh(g, hermiticity_tol)
    return (v * np.exp(1j * theta * w)) @ np.conj(v.T)


def batch_inverse(stack, singularity_threshold=DEFAULT_SINGULARITY_THRESHOLD):
    """Invert a ``(N, d, d)`` stack; returns ``(inverses, ok_mask)``."""
    stack = np.ascontiguousarray(stack, dtype=np.complex128)
    if USE_NUMBA:
        return _kernels.batch_inverse_nb(stack, singularity_threshold)
    return _kernels.batch_inverse_np(stack, singularity_threshold)


def batch_hermitian_eigenvalues(stack):
    """Ascending eigenvalues for a ``(N, d, d)`` stack of Hermitian matrices."""
    stack = np.ascontiguousarray(stack, dtype=np.complex128)
    stack = 0.5 * (stack + np.conj(np.swapaxes(stack, 1, 2)))
    if USE_NUMBA:
        return _kernels.batch_eigvalsh_nb(stack)
    return _kernels.batch_eigvalsh_np(stack)
