import math

import numpy as np
import pytest

from markov_scope.channels import PAULI, ChannelSpec, Constant, NoiseAngles, WeightedKrausMap, build_map
from markov_scope.divisibility import transfer_stack
from markov_scope.linalg import hermitian_eigenvalues
from markov_scope.transfer import (
    NotInvertibleError,
    NumericalCorruptionError,
    choi_from_kraus_direct,
    choi_from_transfer,
    choi_reshuffle,
    maximally_entangled,
    partial_trace,
    propagator_transfer,
    transfer_from_map,
    transfer_from_unitaries,
)

from conftest import random_kraus_map

IDENTITY_MAP = WeightedKrausMap([1.0], np.eye(2)[None])


def z_dephasing(q):
    return WeightedKrausMap([(1 + q) / 2, (1 - q) / 2], np.stack([PAULI["i"], PAULI["z"]]))


def test_transfer_examples():
    assert np.array_equal(transfer_from_map(IDENTITY_MAP), np.eye(4))
    q = math.exp(-0.37)
    assert np.abs(transfer_from_map(z_dephasing(q)) - np.diag([1, q, q, 1])).max() < 1e-15
    assert np.abs(transfer_from_map(z_dephasing(0.0)) - np.diag([1, 0, 0, 1])).max() < 1e-15


def test_transfer_closed_form_matches_definition(rng):
    for _ in range(100):
        m = random_kraus_map(rng)
        fast = transfer_from_unitaries(m.weights, m.operators)
        assert np.abs(fast - transfer_from_map(m)).max() < 1e-14


def test_choi_from_transfer_examples():
    p_plus = np.zeros((4, 4))
    p_plus[np.ix_([0, 3], [0, 3])] = 0.5
    assert np.abs(maximally_entangled(2) - p_plus).max() < 1e-15
    assert np.abs(choi_from_transfer(np.eye(4)) - p_plus).max() < 1e-15
    assert np.abs(choi_from_transfer(np.diag([1, 0, 0, 1])) - np.diag([0.5, 0, 0, 0.5])).max() < 1e-15


def test_choi_direct_examples():
    assert np.abs(choi_from_kraus_direct(IDENTITY_MAP) - maximally_entangled(2)).max() < 1e-15
    flip = WeightedKrausMap([0.75, 0.25], np.stack([PAULI["i"], PAULI["x"]]))
    w = hermitian_eigenvalues(choi_from_kraus_direct(flip))
    assert np.abs(w - [0, 0, 0.25, 0.75]).max() < 1e-15


def test_choi_oracle_equivalence(rng):
    worst = 0.0
    for _ in range(1000):
        m = random_kraus_map(rng)
        a = choi_from_transfer(transfer_from_map(m))
        b = choi_from_kraus_direct(m)
        worst = max(worst, np.linalg.norm(a - b))
    assert worst <= 1e-11


def test_reshuffle_matches_basis_sum(rng):
    for _ in range(50):
        phi = transfer_from_map(random_kraus_map(rng))
        assert np.abs(choi_reshuffle(phi) - choi_from_transfer(phi)).max() < 1e-15


def test_choi_trace_and_marginal(rng):
    for _ in range(300):
        w = choi_from_kraus_direct(random_kraus_map(rng))
        assert abs(np.trace(w) - 1) < 1e-10
        # with kron(G_b, G_a) the first factor is the untouched reference system
        assert np.abs(partial_trace(w, keep=0) - np.eye(2) / 2).max() < 1e-10


def test_composition_is_matrix_product(rng):
    for _ in range(200):
        m1, m2 = random_kraus_map(rng), random_kraus_map(rng)
        lhs = transfer_from_map(m2.compose(m1))
        assert np.linalg.norm(lhs - transfer_from_map(m2) @ transfer_from_map(m1)) <= 1e-11


def test_choi_rejects_corrupt_input():
    phi = np.zeros((4, 4), complex)
    phi[0, 1] = 1.0
    with pytest.raises(NumericalCorruptionError):
        choi_from_transfer(phi)


def test_propagator_examples(backend):
    phi = transfer_from_map(z_dephasing(0.4))
    assert np.abs(propagator_transfer(phi, phi) - np.eye(4)).max() < 1e-15
    g, t, s = 0.8, 2.5, 1.1
    prop = propagator_transfer(
        np.diag([1, math.exp(-g * t), math.exp(-g * t), 1]),
        np.diag([1, math.exp(-g * s), math.exp(-g * s), 1]),
    )
    expect = np.diag([1, math.exp(-g * (t - s)), math.exp(-g * (t - s)), 1])
    assert np.abs(prop - expect).max() < 1e-15
    with pytest.raises(NotInvertibleError) as err:
        propagator_transfer(np.eye(4), np.diag([1, 0, 0, 1]), s=7.0)
    assert err.value.s == 7.0


def test_semigroup_on_grid():
    spec = ChannelSpec((Constant(1.0), Constant(0.5), Constant(1.5)))
    ts = np.linspace(0, 5, 50)
    phis = transfer_stack(spec, ts)
    worst = 0.0
    for i, t in enumerate(ts):
        sums = transfer_stack(spec, t + ts)
        worst = max(worst, np.linalg.norm(sums - phis[i] @ phis, axis=(1, 2)).max())
    assert worst <= 1e-10


def test_transfer_stack_matches_build_map():
    spec = ChannelSpec((Constant(0.2), Constant(0.0), Constant(1.0)), NoiseAngles(1.0, 2.0, 3.0))
    ts = [0.0, 0.5, 2.0]
    for t, phi in zip(ts, transfer_stack(spec, ts)):
        assert np.abs(phi - transfer_from_map(build_map(spec, t))).max() < 1e-14
