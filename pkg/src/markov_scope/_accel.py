"""Backend switch for the hot kernels.

Kernels are written once as plain loops and compiled with numba when it is
importable. Set ``MARKOV_SCOPE_DISABLE_NUMBA=1`` to force the vectorised
numpy path instead (also used automatically when numba is missing).
"""
import os

_FALSY = {"", "0", "false", "no", "off"}


def _flag(name):
    return os.environ.get(name, "").strip().lower() not in _FALSY


try:
    import numba

    HAVE_NUMBA = True
    # prefer OpenMP: the bundled TBB is often too old and only produces a warning
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "tbb", "workqueue"]
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _flag("MARKOV_SCOPE_DISABLE_NUMBA")


def njit(*args, **kwargs):
    """``numba.njit`` when available, otherwise an identity decorator."""
    if HAVE_NUMBA:
        return numba.njit(*args, cache=True, **kwargs)

    def wrap(fn):
        return fn

    return wrap


if HAVE_NUMBA:
    prange = numba.prange
else:  # pragma: no cover
    prange = range


def configure_threads():
    """Apply ``MARKOV_SCOPE_THREADS`` (0 or unset means numba's default)."""
    raw = os.environ.get("MARKOV_SCOPE_THREADS", "0").strip() or "0"
    n = int(raw)
    if n < 0:
        raise ValueError("MARKOV_SCOPE_THREADS must be >= 0")
    if HAVE_NUMBA and n > 0:
        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))
    return n
