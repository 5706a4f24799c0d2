"""CP-divisibility and semigroup checks over (t, s) time grids.

For every grid pair ``t > s`` the propagator ``Phi(t) Phi(s)^-1`` is mapped to
its Choi matrix and diagonalised; the dynamics is CP-divisible on the grid
when no eigenvalue drops below ``-tolerance``.
"""
import enum
import logging
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Tuple

import numpy as np

from . import _kernels
from ._accel import USE_NUMBA
from .channels import kraus_operators, kraus_weights
from .linalg import DEFAULT_SINGULARITY_THRESHOLD, batch_inverse
from .transfer import CHOI_HERMITICITY_LIMIT, NumericalCorruptionError, transfer_from_unitaries

log = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-9
DEFAULT_POINTS = 200
EIGEN_COLUMNS = ("lambda1", "lambda2", "lambda3", "lambda4")


@dataclass(frozen=True)
class TimeGrid:
    """``points`` equally spaced times on ``[0, t_max]``, both ends included."""

    t_max: float
    points: int = DEFAULT_POINTS

    def __post_init__(self):
        if not (np.isfinite(self.t_max) and self.t_max > 0):
            raise ValueError("t_max must be a positive finite number")
        if int(self.points) != self.points or self.points < 2:
            raise ValueError("points must be an integer >= 2")

    @classmethod
    def default_for(cls, spec, points=DEFAULT_POINTS):
        """``t_max = 10`` when every rate is bounded by 1, else 5."""
        return cls(10.0 if spec.rate_bound <= 1 else 5.0, points)

    @property
    def times(self):
        return np.linspace(0.0, self.t_max, int(self.points))

    @property
    def n_pairs(self):
        return self.points * (self.points - 1) // 2


class Verdict(str, enum.Enum):
    MARKOVIAN = "Markovian"
    NON_MARKOVIAN = "NonMarkovian"
    NOT_INVERTIBLE = "NotInvertible"


@dataclass
class DivisibilityReport:
    verdict: Verdict
    min_eigenvalue: float
    argmin: Tuple[float, float]
    tolerance_used: float
    eigenvalue_trace: np.ndarray = field(repr=False)
    not_invertible_at: Tuple[float, ...] = ()

    @property
    def first_not_invertible(self) -> Optional[float]:
        return self.not_invertible_at[0] if self.not_invertible_at else None


class SemigroupResult(NamedTuple):
    max_defect: float
    is_semigroup: bool
    argmax: Tuple[float, float]


def transfer_stack(spec, times):
    """Transfer matrices ``Phi(t)`` for every time in ``times``, shape ``(T, 4, 4)``."""
    ops = kraus_operators(spec)
    weights = np.array([kraus_weights(spec, float(t)) for t in times])
    return transfer_from_unitaries(weights, np.broadcast_to(ops, (len(times),) + ops.shape))


def _propagator_spectra(phis, invs, t_idx, s_idx):
    t_idx = np.ascontiguousarray(t_idx, dtype=np.int64)
    s_idx = np.ascontiguousarray(s_idx, dtype=np.int64)
    n = int(round(np.sqrt(phis.shape[1])))
    if USE_NUMBA:
        ev, resid = _kernels.propagator_choi_eigvals_nb(phis, invs, t_idx, s_idx, n)
    else:
        ev, resid = _kernels.propagator_choi_eigvals_np(phis, invs, t_idx, s_idx, n)
    # Round-off in Phi(t) Phi(s)^-1 grows like eps * cond(Phi(s)), so a near
    # singular Phi(s) legitimately leaves more than the fixed limit behind.
    scale = np.linalg.norm(phis, axis=(1, 2))[t_idx] * np.linalg.norm(invs, axis=(1, 2))[s_idx]
    limit = np.maximum(CHOI_HERMITICITY_LIMIT, n * n * np.finfo(float).eps * scale)
    bad = ~(resid <= limit)
    if bad.any():
        k = int(np.argmax(bad))
        raise NumericalCorruptionError(
            f"propagator Choi hermiticity residual {resid[k]:.3e} exceeds {limit[k]:.3e}"
        )
    return ev


def eigenvalue_surface(spec, grid, singularity_threshold=DEFAULT_SINGULARITY_THRESHOLD):
    """Rows ``(t, s, l1, l2, l3, l4)`` for every grid pair ``t > s``.

    Returns ``(rows, not_invertible_times)``; pairs whose ``s`` has a singular
    transfer matrix are left out and logged.
    """
    times = grid.times
    phis = np.ascontiguousarray(transfer_stack(spec, times))
    invs, ok = batch_inverse(phis, singularity_threshold)
    bad = times[~np.asarray(ok)]
    for s in bad:
        log.warning("transfer matrix not invertible at s=%.17g; skipping its rows", s)
    t_idx, s_idx = np.tril_indices(len(times), k=-1)
    keep = np.asarray(ok)[s_idx]
    t_idx, s_idx = t_idx[keep], s_idx[keep]
    ev = _propagator_spectra(phis, invs, t_idx, s_idx)
    rows = np.column_stack([times[t_idx], times[s_idx], ev])
    return rows, tuple(float(s) for s in bad)


def check_cp_divisibility(
    spec,
    grid,
    tolerance=DEFAULT_TOLERANCE,
    singularity_threshold=DEFAULT_SINGULARITY_THRESHOLD,
):
    """Decide CP-divisibility of the channel's dynamics on ``grid``.

    A negative propagator-Choi eigenvalue anywhere gives ``NON_MARKOVIAN``.
    Otherwise a singular ``Phi(s)`` at some grid time gives ``NOT_INVERTIBLE``
    (the propagator from that time does not exist), and the remaining rows are
    still reported.
    """
    if not tolerance > 0:
        raise ValueError("tolerance must be positive")
    rows, bad = eigenvalue_surface(spec, grid, singularity_threshold)
    if len(rows):
        k = int(np.argmin(rows[:, 2]))
        min_ev = float(rows[k, 2])
        argmin = (float(rows[k, 0]), float(rows[k, 1]))
    else:
        min_ev, argmin = float("nan"), (float("nan"), float("nan"))
    if len(rows) and min_ev < -tolerance:
        verdict = Verdict.NON_MARKOVIAN
    elif bad:
        verdict = Verdict.NOT_INVERTIBLE
    else:
        verdict = Verdict.MARKOVIAN
    return DivisibilityReport(verdict, min_ev, argmin, tolerance, rows, bad)


def semigroup_defects(spec, grid):
    """Rows ``(t, s, ||Phi(t+s) - Phi(t) Phi(s)||_F)`` for grid pairs with ``t + s <= t_max``."""
    times = grid.times
    i, j = np.meshgrid(np.arange(len(times)), np.arange(len(times)), indexing="ij")
    sums = times[i] + times[j]
    mask = sums <= grid.t_max * (1 + 1e-12)
    i, j, sums = i[mask], j[mask], sums[mask]
    phis = transfer_stack(spec, times)
    phi_sum = transfer_stack(spec, sums)
    defect = np.linalg.norm(phi_sum - phis[i] @ phis[j], axis=(1, 2))
    return np.column_stack([times[i], times[j], defect])


def check_semigroup(spec, grid, tolerance=DEFAULT_TOLERANCE):
    """Largest semigroup defect on the grid and whether it is within ``tolerance``."""
    rows = semigroup_defects(spec, grid)
    k = int(np.argmax(rows[:, 2]))
    worst = float(rows[k, 2])
    return SemigroupResult(worst, worst <= tolerance, (float(rows[k, 0]), float(rows[k, 1])))
