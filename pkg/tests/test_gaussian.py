import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sqinterf import gaussian as g
from sqinterf import fock

reals = st.floats(-1.5, 1.5, allow_nan=False)
phases = st.floats(-math.pi, math.pi, allow_nan=False)
trans = st.floats(0.0, 1.0, allow_nan=False)


# -- construction ------------------------------------------------------------

def test_vacuum_moments():
    v = g.vacuum(1)
    assert np.array_equal(v.mean, [0.0, 0.0])
    assert np.allclose(v.cov, 0.5 * np.eye(2))
    v2 = g.vacuum(2)
    assert v2.mean.shape == (4,) and np.allclose(v2.cov, 0.5 * np.eye(4))
    assert g.homodyne_stats(v, 0, "cosine") == g.MomentReport(0.0, 0.5)


def test_vacuum_rejects_zero_modes():
    with pytest.raises(ValueError):
        g.vacuum(0)


def test_state_is_immutable():
    v = g.vacuum(1)
    with pytest.raises(ValueError):
        v.mean[0] = 1.0


def test_invalid_covariance_rejected():
    with pytest.raises(g.InvalidStateError):
        g.GaussianState(np.zeros(2), np.diag([1.0, -0.1]))
    with pytest.raises(g.InvalidStateError):
        g.GaussianState(np.zeros(2), np.array([[1.0, 0.2], [0.0, 1.0]]))
    with pytest.raises(g.InvalidStateError):
        g.GaussianState(np.zeros(3), np.eye(3))


def test_tiny_negative_eigenvalue_clamped():
    st_ = g.GaussianState(np.zeros(2), np.diag([1.0, -1e-14]))
    assert np.linalg.eigvalsh(st_.cov).min() >= 0.0


# -- single-mode operations --------------------------------------------------

def test_displace_values_and_inverse():
    alpha = 2.0
    s = g.displace(g.vacuum(1), 0, math.sqrt(2) * alpha, 0.0)
    assert s.mean == pytest.approx([2.8284271247461903, 0.0])
    assert np.allclose(s.cov, 0.5 * np.eye(2))
    back = g.displace(g.displace(s, 0, 0.3, -0.7), 0, -0.3, 0.7)
    assert back.allclose(s)


def test_displace_bad_mode():
    with pytest.raises(IndexError):
        g.displace(g.vacuum(1), 1, 1.0, 0.0)


def test_coherent_photon_stats_poisson():
    s = g.displace(g.vacuum(1), 0, math.sqrt(2), 0.0)
    rep = g.photon_stats(s, 0)
    assert rep.mean == pytest.approx(1.0, abs=1e-14)
    assert rep.variance == pytest.approx(1.0, abs=1e-14)


def test_squeeze_cov():
    s = g.squeeze(g.vacuum(1), 0, 1.15)
    assert np.diag(s.cov) == pytest.approx([4.987091, 0.0501294], rel=1e-6)
    assert np.diag(s.cov) == pytest.approx([math.exp(2.3) / 2, math.exp(-2.3) / 2], rel=1e-14)
    assert g.squeeze(s, 0, -1.15).allclose(g.vacuum(1))


def test_squeezed_vacuum_photon_stats():
    rep = g.photon_stats(g.squeeze(g.vacuum(1), 0, 0.5), 0)
    assert rep.mean == pytest.approx(math.sinh(0.5) ** 2, abs=1e-14)
    assert rep.mean == pytest.approx(0.27154, abs=1e-5)
    assert rep.variance == pytest.approx(0.5 * math.sinh(1.0) ** 2, abs=1e-14)
    assert rep.variance == pytest.approx(0.69055, abs=1e-5)


def test_rotation_convention():
    s = g.displace(g.vacuum(1), 0, 1.7, 0.0)
    r = g.rotate(s, 0, math.pi / 2)
    assert r.mean == pytest.approx([0.0, -1.7], abs=1e-15)
    assert np.allclose(g.rotation_matrix(math.pi / 2), -g.Y_MATRIX)
    assert g.rotate(g.vacuum(1), 0, 0.8).allclose(g.vacuum(1))
    assert g.rotate(g.rotate(s, 0, 0.4), 0, -0.4).allclose(s)


def test_loss_examples():
    sq = g.squeeze(g.vacuum(1), 0, 1.15)
    lossy = g.loss(sq, 0, 0.9)
    assert lossy.cov[0, 0] == pytest.approx(0.9 * math.exp(2.3) / 2 + 0.05, rel=1e-14)
    assert lossy.cov[0, 0] == pytest.approx(4.538382, abs=1e-6)
    assert g.loss(sq, 0, 1.0).allclose(sq)
    assert g.loss(g.displace(sq, 0, 3.0, 1.0), 0, 0.0).allclose(g.vacuum(1))
    with pytest.raises(ValueError):
        g.loss(sq, 0, 1.2)
    with pytest.raises(ValueError):
        g.loss(sq, 0, -0.1)


def test_loss_cross_block_scaling():
    tms = g.squeeze_two_mode(g.vacuum(2), 0, 1, 0.7)
    out = g.loss(tms, 0, 0.64)
    assert out.cov[0, 2] == pytest.approx(0.8 * tms.cov[0, 2], rel=1e-14)
    assert out.cov[2, 2] == tms.cov[2, 2]


# -- two-mode operations -----------------------------------------------------

def test_two_mode_squeeze_pm_decomposition():
    r = 0.8
    tms = g.squeeze_two_mode(g.vacuum(2), 0, 1, r)
    pm = g.beamsplitter_5050(tms, 0, 1, +1)
    expected = np.zeros((4, 4))
    expected[:2, :2] = 0.5 * np.diag([math.exp(2 * r), math.exp(-2 * r)])
    expected[2:, 2:] = 0.5 * np.diag([math.exp(-2 * r), math.exp(2 * r)])
    assert np.allclose(pm.cov, expected, atol=1e-12)
    assert g.squeeze_two_mode(g.vacuum(2), 0, 1, 0.0).allclose(g.vacuum(2))


def test_two_mode_squeeze_total_photons():
    rep = g.photon_stats_total(g.squeeze_two_mode(g.vacuum(2), 0, 1, 0.5), [0, 1])
    assert rep.mean == pytest.approx(2 * math.sinh(0.5) ** 2, abs=1e-14)
    assert rep.mean == pytest.approx(0.54308, abs=1e-5)


def test_two_mode_squeeze_distinct_modes():
    with pytest.raises(ValueError):
        g.squeeze_two_mode(g.vacuum(2), 1, 1, 0.3)
    with pytest.raises(ValueError):
        g.beamsplitter_5050(g.vacuum(2), 0, 0)


def test_beamsplitter_examples():
    alpha = 1.3
    s = g.displace(g.vacuum(2), 0, math.sqrt(2) * alpha, 0.0)
    for sign in (1, -1):
        out = g.beamsplitter_5050(s, 0, 1, sign)
        assert out.mode_mean(0) == pytest.approx([alpha, 0.0])
        assert out.mode_mean(1) == pytest.approx([alpha, 0.0])
    sq = g.squeeze(g.vacuum(2), 1, 0.9)
    there_and_back = g.beamsplitter_5050(g.beamsplitter_5050(sq, 0, 1, 1), 0, 1, 1)
    assert there_and_back.allclose(sq, atol=1e-12)


def test_photon_total_rejects_duplicates():
    with pytest.raises(ValueError):
        g.photon_stats_total(g.vacuum(2), [0, 0])
    with pytest.raises(ValueError):
        g.photon_stats_total(g.vacuum(2), [])


def test_total_of_uncorrelated_modes_adds():
    s = g.squeeze(g.displace(g.vacuum(2), 0, 1.0, 0.5), 1, 0.4)
    tot = g.photon_stats_total(s, [0, 1])
    a, b = g.photon_stats(s, 0), g.photon_stats(s, 1)
    assert tot.mean == pytest.approx(a.mean + b.mean, abs=1e-14)
    assert tot.variance == pytest.approx(a.variance + b.variance, abs=1e-14)


def test_symplectic_ops():
    for m in (g.squeeze_matrix(0.7), g.rotation_matrix(0.3)):
        op = g.SymplecticOp(m, "squeeze", (0,))
        assert op.is_symplectic()
        assert abs(np.linalg.det(m) - 1.0) < 1e-12
    for m in (g.two_mode_squeeze_matrix(0.5), g.beamsplitter_matrix(1), g.beamsplitter_matrix(-1)):
        assert g.SymplecticOp(m, "beamsplitter", (0, 1)).is_symplectic()
    with pytest.raises(ValueError):
        g.beamsplitter_matrix(2)


# -- properties --------------------------------------------------------------

ops = st.one_of(
    st.tuples(st.just("squeeze"), reals),
    st.tuples(st.just("rotate"), phases),
    st.tuples(st.just("displace"), st.tuples(reals, reals)),
)


def _run(chain, state):
    for kind, arg in chain:
        if kind == "squeeze":
            state = g.squeeze(state, 0, arg)
        elif kind == "rotate":
            state = g.rotate(state, 0, arg)
        elif kind == "displace":
            state = g.displace(state, 0, *arg)
        else:
            state = g.loss(state, 0, arg)
    return state


def _det_roundoff(state):
    # a 2x2 determinant cancels two products of size |sigma|^2
    return 8 * np.finfo(float).eps * float(np.max(np.abs(state.cov))) ** 2


@given(st.lists(ops, max_size=8))
def test_pure_chains_stay_minimum_uncertainty(chain):
    s = _run(chain, g.vacuum(1))
    assert g.mode_purity_det(s, 0) == pytest.approx(0.25, abs=max(1e-10, _det_roundoff(s)))


@given(st.lists(st.one_of(ops, st.tuples(st.just("loss"), trans)), max_size=8))
def test_lossy_chains_respect_uncertainty(chain):
    s = _run(chain, g.vacuum(1))
    assert g.mode_purity_det(s, 0) >= 0.25 - max(1e-12, _det_roundoff(s))


@given(trans, trans, reals, st.tuples(reals, reals))
def test_loss_composes_multiplicatively(t1, t2, r, d):
    s = g.displace(g.squeeze(g.vacuum(1), 0, r), 0, *d)
    a = g.loss(g.loss(s, 0, t1), 0, t2)
    b = g.loss(s, 0, t1 * t2)
    assert a.allclose(b, atol=1e-12)


@given(st.floats(-3, 3), st.floats(-3, 3))
def test_coherent_state_is_poissonian(dc, ds):
    rep = g.photon_stats(g.displace(g.vacuum(1), 0, dc, ds), 0)
    assert rep.variance == pytest.approx(rep.mean, abs=1e-12)


@given(reals, st.tuples(reals, reals, reals, reals))
def test_two_mode_squeezer_equals_pm_single_mode_squeezers(r, d):
    s = g.displace(g.displace(g.vacuum(2), 0, d[0], d[1]), 1, d[2], d[3])
    direct = g.squeeze_two_mode(s, 0, 1, r)
    pm = g.beamsplitter_5050(s, 0, 1, 1)
    pm = g.squeeze(g.squeeze(pm, 0, r), 1, -r)
    # BS(+) is an involution, so it is its own inverse
    via = g.beamsplitter_5050(pm, 0, 1, 1)
    assert direct.allclose(via, atol=1e-12)


@given(st.lists(ops, max_size=5), st.integers(0, 1))
def test_beamsplitter_conserves_photon_total(chain, which):
    s = g.squeeze_two_mode(g.vacuum(2), 0, 1, 0.4)
    s = g.displace(s, which, 0.7, -0.2)
    before = g.photon_stats_total(s, [0, 1])
    after = g.photon_stats_total(g.beamsplitter_5050(s, 0, 1, 1 - 2 * which), [0, 1])
    assert after.mean == pytest.approx(before.mean, abs=1e-12)
    assert after.variance == pytest.approx(before.variance, abs=1e-10)


# -- Fock-oracle agreement grid ---------------------------------------------

@pytest.mark.parametrize("r", [-0.5, 0.0, 0.5])
@pytest.mark.parametrize("alpha", [0.0, 1.0])
@pytest.mark.parametrize("t", [0.5, 0.9, 1.0])
@pytest.mark.parametrize("phi", [0.0, 0.3, 1.0])
def test_engine_matches_fock_oracle_grid(r, alpha, t, phi):
    steps = [("squeeze", 0, r), ("displace", 0, math.sqrt(2) * alpha, 0.0), ("rotate", 0, phi), ("loss", 0, t)]
    state = g.loss(g.rotate(g.displace(g.squeeze(g.vacuum(1), 0, r), 0, math.sqrt(2) * alpha, 0.0), 0, phi), 0, t)
    mom = fock.fock_moments(fock.run_fock(steps, 1, 60))
    for q, idx in (("cosine", 0), ("sine", 1)):
        rep = g.homodyne_stats(state, 0, q)
        assert mom.mean[idx] == pytest.approx(rep.mean, abs=1e-6)
        assert mom.cov[idx, idx] == pytest.approx(rep.variance, abs=1e-6)
    rep = g.photon_stats(state, 0)
    assert mom.mean_n == pytest.approx(rep.mean, abs=1e-6)
    assert mom.var_n == pytest.approx(rep.variance, abs=1e-6)
