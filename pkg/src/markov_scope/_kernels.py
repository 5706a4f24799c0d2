"""Small dense complex kernels: Jacobi eigensolver, Gauss-Jordan inverse and
the fused propagator -> Choi -> spectrum sweep.

Every kernel exists twice. The ``*_nb`` variants are scalar loops compiled by
numba and parallelised over the batch axis; the ``*_np`` variants run the same
algorithm vectorised over the batch axis in plain numpy. The two are checked
against each other in the test suite and timed in ``benchmarks/``.
"""
import numpy as np

from ._accel import njit, prange

MAX_SWEEPS = 60
# stop when the off-diagonal norm drops below OFF_RTOL * frobenius norm
OFF_RTOL = 1e-15
# off-diagonal magnitudes below this are left alone (avoids subnormal division)
TINY = 1e-300


# ---------------------------------------------------------------------------
# scalar loop kernels (numba targets)
# ---------------------------------------------------------------------------


def _jacobi_eigh(m, want_vectors):
    n = m.shape[0]
    a = m.copy()
    v = np.eye(n, dtype=np.complex128)
    for _ in range(MAX_SWEEPS):
        off = 0.0
        total = 0.0
        for i in range(n):
            for j in range(n):
                x = abs(a[i, j]) ** 2
                total += x
                if i != j:
                    off += x
        if off <= OFF_RTOL * OFF_RTOL * total:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r < TINY:
                    continue
                ph = apq / r
                theta = (a[q, q].real - a[p, p].real) / (2.0 * r)
                if theta >= 0.0:
                    t = 1.0 / (theta + np.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # J = diag(1, conj(ph)) @ [[c, s], [-s, c]]
                j00 = c + 0j
                j01 = s + 0j
                j10 = -s * np.conj(ph)
                j11 = c * np.conj(ph)
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = akp * j00 + akq * j10
                    a[k, q] = akp * j01 + akq * j11
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = np.conj(j00) * apk + np.conj(j10) * aqk
                    a[q, k] = np.conj(j01) * apk + np.conj(j11) * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                if want_vectors:
                    for k in range(n):
                        vkp = v[k, p]
                        vkq = v[k, q]
                        v[k, p] = vkp * j00 + vkq * j10
                        v[k, q] = vkp * j01 + vkq * j11
    w = np.empty(n)
    for i in range(n):
        w[i] = a[i, i].real
    order = np.argsort(w)
    return w[order], v[:, order]


def _gauss_jordan_inverse(m, threshold):
    n = m.shape[0]
    a = m.copy()
    inv = np.eye(n, dtype=np.complex128)
    for col in range(n):
        piv = col
        best = abs(a[col, col])
        for r in range(col + 1, n):
            x = abs(a[r, col])
            if x > best:
                best = x
                piv = r
        if best < threshold:
            return inv, False
        if piv != col:
            for k in range(n):
                tmp = a[col, k]
                a[col, k] = a[piv, k]
                a[piv, k] = tmp
                tmp = inv[col, k]
                inv[col, k] = inv[piv, k]
                inv[piv, k] = tmp
        d = 1.0 / a[col, col]
        for k in range(n):
            a[col, k] *= d
            inv[col, k] *= d
        for r in range(n):
            if r == col:
                continue
            f = a[r, col]
            if f == 0.0:
                continue
            for k in range(n):
                a[r, k] -= f * a[col, k]
                inv[r, k] -= f * inv[col, k]
    return inv, True


def _choi_reshuffle(phi, n):
    d = n * n
    w = np.empty((d, d), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    w[k * n + i, l * n + j] = phi[i * n + j, k * n + l] / n
    return w


jacobi_eigh_nb = njit(_jacobi_eigh)
gauss_jordan_inverse_nb = njit(_gauss_jordan_inverse)
choi_reshuffle_nb = njit(_choi_reshuffle)


@njit(parallel=True)
def batch_eigvalsh_nb(stack):
    out = np.empty((stack.shape[0], stack.shape[1]))
    for b in prange(stack.shape[0]):
        w, _ = jacobi_eigh_nb(stack[b], False)
        out[b] = w
    return out


@njit(parallel=True)
def batch_inverse_nb(stack, threshold):
    out = np.empty_like(stack)
    ok = np.empty(stack.shape[0], dtype=np.bool_)
    for b in prange(stack.shape[0]):
        inv, good = gauss_jordan_inverse_nb(stack[b], threshold)
        out[b] = inv
        ok[b] = good
    return out, ok


@njit(parallel=True)
def propagator_choi_eigvals_nb(phis, invs, t_idx, s_idx, n):
    """Spectra of the Choi matrices of ``phis[t] @ invs[s]`` for each pair.

    Returns ``(eigenvalues, hermiticity_residual)``; the residual is the
    Frobenius norm of ``W - W^dagger`` before symmetrisation.
    """
    npairs = t_idx.shape[0]
    d = n * n
    out = np.empty((npairs, d))
    resid = np.empty(npairs)
    for b in prange(npairs):
        prop = phis[t_idx[b]] @ invs[s_idx[b]]
        w = choi_reshuffle_nb(prop, n)
        acc = 0.0
        for i in range(d):
            for j in range(d):
                acc += abs(w[i, j] - np.conj(w[j, i])) ** 2
        resid[b] = np.sqrt(acc)
        herm = 0.5 * (w + np.conj(w.T))
        ev, _ = jacobi_eigh_nb(herm, False)
        out[b] = ev
    return out, resid


# ---------------------------------------------------------------------------
# vectorised numpy kernels (fallback path)
# ---------------------------------------------------------------------------


def batch_eigh_np(stack, want_vectors=False):
    a = np.array(stack, dtype=np.complex128, copy=True)
    nb, n, _ = a.shape
    v = np.broadcast_to(np.eye(n, dtype=np.complex128), a.shape).copy()
    rows = np.arange(nb)
    offdiag = ~np.eye(n, dtype=bool)
    for _ in range(MAX_SWEEPS):
        mag = np.abs(a) ** 2
        total = mag.sum(axis=(1, 2))
        off = mag[:, offdiag].sum(axis=1)
        if np.all(off <= OFF_RTOL * OFF_RTOL * total):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[:, p, q]
                r = np.abs(apq)
                live = r >= TINY
                rs = np.where(live, r, 1.0)
                ph = np.where(live, apq / rs, 1.0)
                with np.errstate(over="ignore"):
                    theta = (a[:, q, q].real - a[:, p, p].real) / (2.0 * rs)
                    t = np.sign(theta) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
                t = np.where(theta == 0.0, 1.0, t)
                t = np.where(live, t, 0.0)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                j00 = c.astype(np.complex128)
                j01 = s.astype(np.complex128)
                j10 = -s * np.conj(ph)
                j11 = c * np.conj(ph)
                akp = a[:, :, p].copy()
                akq = a[:, :, q].copy()
                a[:, :, p] = akp * j00[:, None] + akq * j10[:, None]
                a[:, :, q] = akp * j01[:, None] + akq * j11[:, None]
                apk = a[:, p, :].copy()
                aqk = a[:, q, :].copy()
                a[:, p, :] = np.conj(j00)[:, None] * apk + np.conj(j10)[:, None] * aqk
                a[:, q, :] = np.conj(j01)[:, None] * apk + np.conj(j11)[:, None] * aqk
                a[:, p, q] = 0.0
                a[:, q, p] = 0.0
                a[:, p, p] = a[:, p, p].real
                a[:, q, q] = a[:, q, q].real
                if want_vectors:
                    vkp = v[:, :, p].copy()
                    vkq = v[:, :, q].copy()
                    v[:, :, p] = vkp * j00[:, None] + vkq * j10[:, None]
                    v[:, :, q] = vkp * j01[:, None] + vkq * j11[:, None]
    w = np.einsum("bii->bi", a).real
    order = np.argsort(w, axis=1, kind="stable")
    w = np.take_along_axis(w, order, axis=1)
    v = v[rows[:, None], :, order].transpose(0, 2, 1)
    return w, v


def batch_eigvalsh_np(stack):
    return batch_eigh_np(stack, want_vectors=False)[0]


def batch_inverse_np(stack, threshold):
    a = np.array(stack, dtype=np.complex128, copy=True)
    nb, n, _ = a.shape
    inv = np.broadcast_to(np.eye(n, dtype=np.complex128), a.shape).copy()
    ok = np.ones(nb, dtype=bool)
    rows = np.arange(nb)
    for col in range(n):
        piv = col + np.argmax(np.abs(a[:, col:, col]), axis=1)
        best = np.abs(a[rows, piv, col])
        ok &= best >= threshold
        swap_a = a[rows, piv].copy()
        swap_i = inv[rows, piv].copy()
        a[rows, piv] = a[:, col]
        inv[rows, piv] = inv[:, col]
        a[:, col] = swap_a
        inv[:, col] = swap_i
        d = a[:, col, col]
        d = np.where(ok, d, 1.0)
        a[:, col] /= d[:, None]
        inv[:, col] /= d[:, None]
        for r in range(n):
            if r == col:
                continue
            f = a[:, r, col].copy()
            a[:, r] -= f[:, None] * a[:, col]
            inv[:, r] -= f[:, None] * inv[:, col]
    return inv, ok


def choi_reshuffle_np(phis, n):
    phis = np.asarray(phis)
    nb = phis.shape[0]
    w = phis.reshape(nb, n, n, n, n).transpose(0, 3, 1, 4, 2)
    return w.reshape(nb, n * n, n * n) / n


def propagator_choi_eigvals_np(phis, invs, t_idx, s_idx, n, chunk=8192):
    out = []
    resid = []
    for lo in range(0, len(t_idx), chunk):
        ti = t_idx[lo:lo + chunk]
        si = s_idx[lo:lo + chunk]
        props = phis[ti] @ invs[si]
        w = choi_reshuffle_np(props, n)
        wh = np.conj(np.swapaxes(w, 1, 2))
        resid.append(np.sqrt((np.abs(w - wh) ** 2).sum(axis=(1, 2))))
        out.append(batch_eigvalsh_np(0.5 * (w + wh)))
    d = n * n
    if not out:
        return np.empty((0, d)), np.empty(0)
    return np.concatenate(out), np.concatenate(resid)
