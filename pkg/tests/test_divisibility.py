import math

import numpy as np
import pytest

from markov_scope.channels import ChannelSpec, Constant, NoiseAngles
from markov_scope.divisibility import (
    TimeGrid,
    Verdict,
    check_cp_divisibility,
    check_semigroup,
    eigenvalue_surface,
    transfer_stack,
)
from markov_scope.linalg import hermitian_eigenvalues
from markov_scope.transfer import choi_from_transfer, propagator_transfer

PERTURBED = math.pi / 2 + 0.1
FIG4_ANGLES = NoiseAngles(PERTURBED, PERTURBED, math.pi + 0.1)


def single_x(gamma, angle=math.pi / 2):
    return ChannelSpec.single("x", Constant(gamma), angle)


def test_time_grid():
    g = TimeGrid(10.0, 5)
    assert g.times.tolist() == [0.0, 2.5, 5.0, 7.5, 10.0]
    assert g.n_pairs == 10
    assert TimeGrid.default_for(single_x(1.0)).t_max == 10.0
    assert TimeGrid.default_for(single_x(1.5)).t_max == 5.0
    for bad in ((0.0, 10), (1.0, 1), (1.0, 2.5)):
        with pytest.raises(ValueError):
            TimeGrid(*bad)


def test_ideal_single_dephasing_markovian(backend):
    report = check_cp_divisibility(single_x(1.0), TimeGrid(10.0, 200))
    assert report.verdict is Verdict.MARKOVIAN
    assert report.min_eigenvalue >= -1e-12
    ev = report.eigenvalue_trace[:, 2:]
    assert np.all((np.abs(ev) <= 1e-9).sum(axis=1) == 2)


def test_ideal_rows_closed_form(backend):
    gamma = 1.0
    rows, bad = eigenvalue_surface(single_x(gamma), TimeGrid(10.0, 60))
    assert bad == ()
    dt = rows[:, 0] - rows[:, 1]
    q = np.exp(-gamma * dt)
    expect = np.sort(np.column_stack([np.zeros_like(q), np.zeros_like(q), (1 - q) / 2, (1 + q) / 2]), axis=1)
    assert np.abs(rows[:, 2:] - expect).max() < 1e-9


def test_equal_times_give_identity_choi():
    spec = ChannelSpec((Constant(1.0), Constant(0.5), Constant(1.5)), FIG4_ANGLES)
    for t in (0.0, 0.7, 3.2):
        phi = transfer_stack(spec, [t])[0]
        w = hermitian_eigenvalues(choi_from_transfer(propagator_transfer(phi, phi)))
        assert np.abs(w - [0, 0, 0, 1]).max() < 1e-12


@pytest.mark.parametrize("gamma", [1.0, 2.0, 3.0])
def test_perturbed_single_dephasing_markovian(backend, gamma):
    report = check_cp_divisibility(single_x(gamma, PERTURBED), TimeGrid(10.0, 80))
    assert report.verdict is Verdict.MARKOVIAN
    assert report.min_eigenvalue >= -1e-9


@pytest.mark.parametrize("rates", [(1.0, 0.5, 1.5), (1.0, 0.0, 1.5)])
def test_perturbed_multi_channel_non_markovian(backend, rates):
    spec = ChannelSpec(tuple(Constant(g) for g in rates), FIG4_ANGLES)
    report = check_cp_divisibility(spec, TimeGrid(5.0, 60))
    assert report.verdict is Verdict.NON_MARKOVIAN
    assert report.min_eigenvalue < -1e-6
    t, s = report.argmin
    assert t > s


def test_ideal_multi_channel_markovian():
    spec = ChannelSpec((Constant(1.0), Constant(0.5), Constant(1.5)))
    assert check_cp_divisibility(spec, TimeGrid(5.0, 60)).verdict is Verdict.MARKOVIAN


@pytest.mark.parametrize("gamma", [0.5, 1.0, 2.0, 3.0, 5.0])
def test_scale_consistency(gamma):
    spec = single_x(gamma)
    assert check_cp_divisibility(spec, TimeGrid.default_for(spec, 80)).verdict is Verdict.MARKOVIAN


def test_rows_have_unit_trace():
    spec = ChannelSpec((Constant(1.0), Constant(0.5), Constant(1.5)), FIG4_ANGLES)
    rows, _ = eigenvalue_surface(spec, TimeGrid(5.0, 50))
    assert rows.shape == (50 * 49 // 2, 6)
    assert np.all(rows[:, 0] > rows[:, 1])
    assert np.abs(rows[:, 2:].sum(axis=1) - 1).max() < 1e-9
    assert np.all(np.diff(rows[:, 2:], axis=1) >= 0)


def test_deterministic():
    spec = ChannelSpec((Constant(1.0), Constant(0.5), Constant(1.5)), FIG4_ANGLES)
    a = check_cp_divisibility(spec, TimeGrid(5.0, 40))
    b = check_cp_divisibility(spec, TimeGrid(5.0, 40))
    assert a.eigenvalue_trace.tobytes() == b.eigenvalue_trace.tobytes()
    assert (a.verdict, a.min_eigenvalue, a.argmin) == (b.verdict, b.min_eigenvalue, b.argmin)


def test_backends_agree(monkeypatch):
    from markov_scope import _accel, divisibility, linalg

    if not _accel.HAVE_NUMBA:
        pytest.skip("numba not installed")
    spec = ChannelSpec((Constant(1.0), Constant(0.0), Constant(1.5)), FIG4_ANGLES)
    out = []
    for use in (True, False):
        monkeypatch.setattr(linalg, "USE_NUMBA", use)
        monkeypatch.setattr(divisibility, "USE_NUMBA", use)
        out.append(check_cp_divisibility(spec, TimeGrid(5.0, 40)))
    assert out[0].verdict is out[1].verdict
    assert np.abs(out[0].eigenvalue_trace - out[1].eigenvalue_trace).max() < 1e-12


def test_refinement_never_hides_violation():
    spec = ChannelSpec((Constant(1.0), Constant(0.5), Constant(1.5)), FIG4_ANGLES)
    coarse = check_cp_divisibility(spec, TimeGrid(5.0, 25))
    fine = check_cp_divisibility(spec, TimeGrid(5.0, 49))
    assert coarse.verdict is Verdict.NON_MARKOVIAN
    assert fine.verdict is Verdict.NON_MARKOVIAN
    assert fine.min_eigenvalue <= coarse.min_eigenvalue + 1e-12


def test_not_invertible_is_its_own_verdict(backend, caplog):
    # ideal full dephasing: exp(-5 s) drops below the pivot threshold for s > ~5.5
    spec = ChannelSpec.single("z", Constant(5.0), math.pi)
    grid = TimeGrid(10.0, 21)
    report = check_cp_divisibility(spec, grid)
    assert report.verdict is Verdict.NOT_INVERTIBLE
    bad = [s for s in grid.times if math.exp(-5 * s) < 1e-12]
    assert list(report.not_invertible_at) == bad
    assert report.first_not_invertible == bad[0]
    skipped = sum(int((grid.times > s).sum()) for s in bad)
    assert len(report.eigenvalue_trace) == grid.n_pairs - skipped
    assert report.min_eigenvalue >= -1e-9
    assert "not invertible" in caplog.text


def test_semigroup_examples():
    rates = (Constant(1.0), Constant(0.5), Constant(1.5))
    res = check_semigroup(ChannelSpec(rates), TimeGrid(5.0, 50))
    assert res.is_semigroup and res.max_defect <= 1e-10
    res = check_semigroup(single_x(1.0, PERTURBED), TimeGrid(10.0, 50))
    assert not res.is_semigroup


def test_semigroup_single_pair_at_zero():
    spec = ChannelSpec((Constant(1.0), Constant(0.5), Constant(1.5)), FIG4_ANGLES)
    res = check_semigroup(spec, TimeGrid(1.0, 2))
    # only (0, 0), (0, 1) and (1, 0) satisfy t + s <= t_max
    assert res.max_defect < 1e-15


def test_ill_conditioned_default_grid_is_not_corruption(backend):
    # cond(Phi(s)) reaches ~e^25 here; the residual limit must follow it
    spec = single_x(5.0)
    report = check_cp_divisibility(spec, TimeGrid.default_for(spec))
    assert report.verdict is Verdict.MARKOVIAN
    assert report.min_eigenvalue >= -1e-9


def test_non_hermiticity_preserving_input_is_corruption(backend, rng):
    from markov_scope.divisibility import _propagator_spectra
    from markov_scope.transfer import NumericalCorruptionError

    phis = np.stack([np.eye(4, dtype=complex), rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))])
    invs = np.stack([np.eye(4, dtype=complex)] * 2)
    with pytest.raises(NumericalCorruptionError):
        _propagator_spectra(phis, invs, np.array([1]), np.array([0]))
