"""Compare the numba and pure-numpy kernels on a full divisibility sweep.

    python benchmarks/bench_kernels.py [--points 200] [--repeat 5]

Both paths run in this process (the kernels are called directly, so the
MARKOV_SCOPE_DISABLE_NUMBA flag is not needed); results are cross-checked.
"""
import argparse
import math
import time

import numpy as np

from markov_scope import _accel, _kernels
from markov_scope.channels import ChannelSpec, Constant, NoiseAngles
from markov_scope.divisibility import TimeGrid, transfer_stack


def best_of(fn, repeat):
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not _accel.HAVE_NUMBA:
        raise SystemExit("numba is not installed; pip install 'markov-scope[fast]'")
    _accel.configure_threads()

    angles = NoiseAngles(math.pi / 2 + 0.1, math.pi / 2 + 0.1, math.pi + 0.1)
    spec = ChannelSpec((Constant(1.0), Constant(0.5), Constant(1.5)), angles)
    phis = np.ascontiguousarray(transfer_stack(spec, TimeGrid(5.0, args.points).times))
    t_idx, s_idx = (np.ascontiguousarray(i, dtype=np.int64) for i in np.tril_indices(args.points, k=-1))
    print(f"grid {args.points} points, {len(t_idx)} pairs, best of {args.repeat}")

    cases = {
        "inverse": (
            lambda: _kernels.batch_inverse_nb(phis, 1e-12),
            lambda: _kernels.batch_inverse_np(phis, 1e-12),
        ),
    }
    invs, _ = _kernels.batch_inverse_np(phis, 1e-12)
    cases["propagator spectra"] = (
        lambda: _kernels.propagator_choi_eigvals_nb(phis, invs, t_idx, s_idx, 2),
        lambda: _kernels.propagator_choi_eigvals_np(phis, invs, t_idx, s_idx, 2),
    )
    for name, (nb, np_) in cases.items():
        nb()  # compile / load cache
        t_nb, out_nb = best_of(nb, args.repeat)
        t_np, out_np = best_of(np_, args.repeat)
        diff = np.abs(out_nb[0] - out_np[0]).max()
        print(f"{name:20s} numba {t_nb * 1e3:9.2f} ms   numpy {t_np * 1e3:9.2f} ms   "
              f"speedup {t_np / t_nb:6.1f}x   max diff {diff:.1e}")


if __name__ == "__main__":
    main()
