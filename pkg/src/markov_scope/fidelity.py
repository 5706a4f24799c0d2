"""Channel fidelity through Choi matrices, and the two fidelity scans.

Fidelity uses the squared convention ``F = (Tr sqrt(sqrt(r1) r2 sqrt(r1)))**2``
so that the Bures distance is ``sqrt(2 (1 - sqrt(F)))``.
"""
import math
from dataclasses import dataclass

import numpy as np

from .channels import Constant, PAULI, WeightedKrausMap, perturbed_pauli, single_dephasing_map
from .linalg import NotPSDError, PSD_CLAMP, _resolution, hermitian_eigenvalues, psd_sqrt
from .transfer import choi_from_kraus_direct, maximally_entangled


@dataclass(frozen=True)
class FidelityScanRow:
    p_or_t: float
    alpha: float
    f_ideal_vs_noisy: float
    f_identity_vs_noisy: float


def _check_state(rho, name):
    rho = np.asarray(rho, dtype=np.complex128)
    if abs(np.trace(rho) - 1) > 1e-9:
        raise ValueError(f"{name} does not have unit trace")
    return rho


def state_fidelity(rho1, rho2):
    """Squared Uhlmann fidelity of two density matrices, clamped to ``[0, 1]``."""
    rho1 = _check_state(rho1, "rho1")
    rho2 = _check_state(rho2, "rho2")
    if hermitian_eigenvalues(rho2)[0] < -PSD_CLAMP:
        raise NotPSDError("rho2 is not positive semidefinite")
    root = psd_sqrt(rho1)
    w = hermitian_eigenvalues(root @ rho2 @ root, hermiticity_tol=1e-8)
    w = np.where(w <= _resolution(w), 0.0, w)
    f = float(np.sum(np.sqrt(w)) ** 2)
    if f > 1 + 1e-10:
        raise ArithmeticError(f"fidelity {f!r} exceeds 1")
    return min(max(f, 0.0), 1.0)


def bures_distance(rho1, rho2):
    f = state_fidelity(rho1, rho2)
    return math.sqrt(max(2 * (1 - math.sqrt(f)), 0.0))


def _mixture(p, u):
    return WeightedKrausMap(np.array([p, 1 - p]), np.stack([PAULI["i"], u]))


def fidelity_scan_p_alpha(p_points=101, alpha_points=241, axis="x"):
    """Fidelities over a uniform ``p in [0, 1]`` by ``alpha in [0, 2 pi)`` grid.

    For each point the noisy map ``p rho + (1-p) U rho U^dagger`` (``U`` the
    perturbed Pauli) is compared with the same mixture using the exact Pauli,
    and with the identity channel. Rows run over ``p`` outer, ``alpha`` inner.
    """
    if p_points < 2 or alpha_points < 2:
        raise ValueError("need at least two points on each axis")
    ps = np.linspace(0.0, 1.0, p_points)
    alphas = np.linspace(0.0, 2 * np.pi, alpha_points, endpoint=False)
    return scan_p_alpha(ps, alphas, axis)


def scan_p_alpha(ps, alphas, axis="x"):
    ident = maximally_entangled(2)
    pauli = PAULI[axis]
    noisy_ops = [perturbed_pauli(axis, a) for a in alphas]
    rows = []
    for p in ps:
        ideal = choi_from_kraus_direct(_mixture(p, pauli))
        for a, u in zip(alphas, noisy_ops):
            noisy = choi_from_kraus_direct(_mixture(p, u))
            rows.append(
                FidelityScanRow(
                    float(p), float(a), state_fidelity(ideal, noisy), state_fidelity(ident, noisy)
                )
            )
    return rows


def fidelity_vs_time(gamma, alphas, t_points=500, t_max=5.0, axis="x"):
    """Noisy single dephasing channel against the ideal one and the identity over time.

    Rows run over ``alpha`` outer, ``t`` inner.
    """
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    ident = maximally_entangled(2)
    rate = Constant(gamma)
    ideal_angle = np.pi if axis == "z" else np.pi / 2
    ts = np.linspace(0.0, t_max, t_points)
    rows = []
    for a in alphas:
        for t in ts:
            ideal = choi_from_kraus_direct(single_dephasing_map(axis, rate, ideal_angle, t))
            noisy = choi_from_kraus_direct(single_dephasing_map(axis, rate, a, t))
            rows.append(
                FidelityScanRow(
                    float(t), float(a), state_fidelity(ideal, noisy), state_fidelity(ident, noisy)
                )
            )
    return rows
