"""Random-unitary qubit channels with noise-perturbed Pauli operators.

A perturbed Pauli operator is ``exp(i * angle * G)`` for one of three fixed
Hermitian generators; the canonical angles ``(pi/2, pi/2, pi)`` give back
sigma_x, sigma_y, sigma_z exactly. Maps are stored as weighted lists of
unitaries, ``rho -> sum_k w_k U_k rho U_k^dagger``.
"""
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .linalg import as_matrix, exp_i_theta_hermitian, hermitian_eigenvalues, identity

AXES = ("x", "y", "z")

GENERATORS = {
    "x": np.array([[1, -1], [-1, 1]], dtype=np.complex128),
    "y": np.array([[1, 1j], [-1j, 1]], dtype=np.complex128),
    "z": np.array([[0, 0], [0, 1]], dtype=np.complex128),
}

PAULI = {
    "i": np.eye(2, dtype=np.complex128),
    "x": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}

WEIGHT_CLAMP = 1e-12
WEIGHT_ERROR = 1e-9


class InvalidDistributionError(ValueError):
    """Probabilities came out negative beyond round-off."""


class InvalidStateError(ValueError):
    """Input is not a density matrix."""


def _axis(axis):
    if axis not in AXES:
        raise ValueError(f"axis must be one of {AXES}, got {axis!r}")
    return axis


# ---------------------------------------------------------------------------
# decoherence rates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Constant:
    gamma: float

    def __post_init__(self):
        if not (math.isfinite(self.gamma) and self.gamma >= 0):
            raise ValueError("Constant rate needs a finite gamma >= 0")

    @property
    def active(self):
        return self.gamma != 0

    @property
    def bound(self):
        return self.gamma

    def rate(self, t):
        return self.gamma

    def integrated(self, t):
        return self.gamma * t


@dataclass(frozen=True)
class SinSq:
    """``gamma(t) = sin(b t)**2``."""

    b: float

    def __post_init__(self):
        if not (math.isfinite(self.b) and self.b > 0):
            raise ValueError("SinSq rate needs a finite b > 0")

    active = True
    bound = 1.0

    def rate(self, t):
        return math.sin(self.b * t) ** 2

    def integrated(self, t):
        return t / 2 - math.sin(2 * self.b * t) / (4 * self.b)


@dataclass(frozen=True)
class ExpDecay:
    """``gamma(t) = exp(-a t)``."""

    a: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and self.a > 0):
            raise ValueError("ExpDecay rate needs a finite a > 0")

    active = True
    bound = 1.0

    def rate(self, t):
        return math.exp(-self.a * t)

    def integrated(self, t):
        return -math.expm1(-self.a * t) / self.a


@dataclass(frozen=True)
class Tanh:
    """``gamma(t) = tanh(a t)``."""

    a: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and self.a > 0):
            raise ValueError("Tanh rate needs a finite a > 0")

    active = True
    bound = 1.0

    def rate(self, t):
        return math.tanh(self.a * t)

    def integrated(self, t):
        x = self.a * t
        # log(cosh x) without overflow for large x
        return (x + math.log1p(math.exp(-2 * x)) - math.log(2)) / self.a


RATE_KINDS = {"constant": Constant, "sin_sq": SinSq, "exp_decay": ExpDecay, "tanh": Tanh}


def integrated_rate(rate, t):
    """Integral of the decoherence rate from 0 to ``t``."""
    if t < 0:
        raise ValueError(f"time must be >= 0, got {t}")
    return rate.integrated(t)


# ---------------------------------------------------------------------------
# specs and maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NoiseAngles:
    alpha: float = math.pi / 2
    beta: float = math.pi / 2
    omega: float = math.pi

    def __post_init__(self):
        if not all(math.isfinite(a) for a in self.as_tuple()):
            raise ValueError("noise angles must be finite")

    def as_tuple(self):
        return (self.alpha, self.beta, self.omega)

    def for_axis(self, axis):
        return self.as_tuple()[AXES.index(_axis(axis))]

    @property
    def is_canonical(self):
        return self == NoiseAngles()


@dataclass(frozen=True)
class ChannelSpec:
    """Rates per axis (x, y, z), noise angles, and an optional single axis.

    With ``single_channel_axis`` set the map is the two-term single dephasing
    family, ``p = (1 + exp(-k * Gamma(t))) / 2`` with ``k = single_decay_factor``
    (1 by default). Otherwise the four-term random-unitary map is used.
    """

    rates: Tuple = (Constant(0.0), Constant(0.0), Constant(0.0))
    noise: NoiseAngles = field(default_factory=NoiseAngles)
    single_channel_axis: Optional[str] = None
    single_decay_factor: float = 1.0

    def __post_init__(self):
        if len(self.rates) != 3:
            raise ValueError("rates must hold exactly three entries (x, y, z)")
        object.__setattr__(self, "rates", tuple(self.rates))
        if self.single_decay_factor not in (1.0, 2.0):
            raise ValueError("single_decay_factor must be 1 or 2")
        if self.single_channel_axis is not None:
            _axis(self.single_channel_axis)
            active = [ax for ax, r in zip(AXES, self.rates) if r.active]
            if active != [self.single_channel_axis]:
                raise ValueError(
                    "single-channel spec needs exactly one active rate, on axis "
                    f"{self.single_channel_axis!r}; active axes are {active}"
                )

    @classmethod
    def single(cls, axis, rate, angle, single_decay_factor=1.0):
        rates = [Constant(0.0)] * 3
        rates[AXES.index(_axis(axis))] = rate
        angles = list(NoiseAngles().as_tuple())
        angles[AXES.index(axis)] = angle
        return cls(tuple(rates), NoiseAngles(*angles), axis, single_decay_factor)

    @property
    def rate_bound(self):
        return max(r.bound for r in self.rates)


@dataclass(frozen=True)
class WeightedKrausMap:
    """``rho -> sum_k weight_k U_k rho U_k^dagger`` with unitary ``U_k``."""

    weights: np.ndarray
    operators: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        ops = np.asarray(self.operators, dtype=np.complex128)
        if ops.ndim != 3 or ops.shape[0] != w.shape[0] or ops.shape[1] != ops.shape[2]:
            raise ValueError("need one square operator per weight")
        if np.any(w < -WEIGHT_ERROR):
            raise InvalidDistributionError(f"negative weight {w.min():.3e}")
        w = np.where(w < 0, 0.0, w)
        if abs(w.sum() - 1) > WEIGHT_CLAMP:
            raise InvalidDistributionError(f"weights sum to {w.sum():.15g}, not 1")
        eye = np.eye(ops.shape[1])
        gram = np.einsum("kji,kjl->kil", np.conj(ops), ops)
        if np.abs(gram - eye).max(initial=0.0) > 1e-10:
            raise ValueError("every operator must be unitary")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "operators", ops)

    @property
    def dim(self):
        return self.operators.shape[1]

    @property
    def terms(self):
        return list(zip(self.weights, self.operators))

    def completeness(self):
        """``sum_k w_k U_k^dagger U_k``; the identity for a trace-preserving map."""
        ops = self.operators
        return np.einsum("k,kji,kjl->il", self.weights, np.conj(ops), ops)

    def apply(self, x):
        """Apply the map linearly to any square matrix ``x``."""
        ops = self.operators
        return np.einsum("k,kij,jl,kml->im", self.weights, ops, x, np.conj(ops))

    def compose(self, first):
        """The map ``self o first`` (``first`` acts first)."""
        w = np.outer(self.weights, first.weights).ravel()
        ops = np.einsum("aij,bjk->abik", self.operators, first.operators)
        return WeightedKrausMap(w, ops.reshape(-1, self.dim, self.dim))


def perturbed_pauli(axis, angle):
    """``exp(i * angle * G_axis)``."""
    return exp_i_theta_hermitian(GENERATORS[_axis(axis)], angle)


def _probability_vector(p):
    p = np.asarray(p, dtype=float)
    if np.any(p < -WEIGHT_ERROR):
        raise InvalidDistributionError(f"probability {p.min():.3e} is negative")
    return np.where(p < 0, 0.0, p)


def single_dephasing_map(axis, rate, noise_angle, t, single_decay_factor=1.0):
    """Two-term map ``p rho + (1 - p) U rho U^dagger`` with ``U`` the perturbed Pauli."""
    gamma_t = integrated_rate(rate, t)
    q = math.exp(-single_decay_factor * gamma_t)
    weights = _probability_vector([(1 + q) / 2, (1 - q) / 2])
    ops = np.stack([identity(2), perturbed_pauli(axis, noise_angle)])
    return WeightedKrausMap(weights, ops)


def multi_channel_probabilities(rates, t):
    """``(p0, p1, p2, p3)`` of the three-axis dephasing semigroup.

    Every ``gamma_j * t`` is replaced by the integrated rate, so time-dependent
    rates reduce to the constant case.
    """
    g1, g2, g3 = (integrated_rate(r, t) for r in rates)
    e23 = math.exp(-2 * (g2 + g3))
    e13 = math.exp(-2 * (g1 + g3))
    e12 = math.exp(-2 * (g1 + g2))
    p = [
        (1 + e23 + e13 + e12) / 4,
        (1 + e23 - e13 - e12) / 4,
        (1 - e23 + e13 - e12) / 4,
        (1 - e23 - e13 + e12) / 4,
    ]
    return tuple(_probability_vector(p))


def kraus_operators(spec):
    """Unitaries of the channel's map, identity first; they do not depend on time."""
    if spec.single_channel_axis is not None:
        ax = spec.single_channel_axis
        return np.stack([identity(2), perturbed_pauli(ax, spec.noise.for_axis(ax))])
    ops = [identity(2)] + [
        perturbed_pauli(ax, angle) for ax, angle in zip(AXES, spec.noise.as_tuple())
    ]
    return np.stack(ops)


def kraus_weights(spec, t):
    """Time-dependent weights matching :func:`kraus_operators`."""
    if spec.single_channel_axis is not None:
        rate = spec.rates[AXES.index(spec.single_channel_axis)]
        q = math.exp(-spec.single_decay_factor * integrated_rate(rate, t))
        return _probability_vector([(1 + q) / 2, (1 - q) / 2])
    return np.array(multi_channel_probabilities(spec.rates, t))


def build_map(spec, t):
    """The channel's dynamical map at time ``t``.

    The identity term is never perturbed.
    """
    return WeightedKrausMap(kraus_weights(spec, t), kraus_operators(spec))


def check_density_matrix(rho, tol=1e-10):
    rho = as_matrix(rho)
    if rho.shape[0] != rho.shape[1]:
        raise InvalidStateError("density matrix must be square")
    if np.linalg.norm(rho - np.conj(rho.T)) > tol:
        raise InvalidStateError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > tol:
        raise InvalidStateError("density matrix does not have unit trace")
    if hermitian_eigenvalues(rho)[0] < -tol:
        raise InvalidStateError("density matrix is not positive semidefinite")
    return rho


def apply_map(kraus_map, rho):
    """Apply the map to a density matrix."""
    rho = check_density_matrix(rho)
    out = kraus_map.apply(rho)
    return 0.5 * (out + np.conj(out.T))
