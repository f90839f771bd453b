import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sqinterf import fock as fk
from sqinterf import gaussian as g


def _moments(state):
    return fk.fock_moments(state)


# -- construction -----------------------------------------------------------

def test_state_validation():
    with pytest.raises(ValueError):
        fk.FockState((1,), np.ones(1))
    with pytest.raises(ValueError):
        fk.FockState((3,), np.ones(4))
    fk.fock_vacuum(2, 5).validate()
    with pytest.raises(ValueError):
        fk.FockState((3,), np.array([1.0, 1.0, 0.0])).validate()


def test_vacuum_moments():
    m = _moments(fk.fock_vacuum(1, 10))
    np.testing.assert_allclose(m.cov, 0.5 * np.eye(2), atol=1e-15)
    assert m.mean_n == 0.0 and m.var_n == 0.0


def test_mode_index_checked():
    with pytest.raises(IndexError):
        fk.fock_squeeze(fk.fock_vacuum(1, 10), 0.1, mode=1)


# -- single operations ------------------------------------------------------

def test_zero_squeeze_is_identity():
    v = fk.fock_vacuum(1, 30)
    np.testing.assert_allclose(fk.fock_squeeze(v, 0.0).data, v.data, atol=1e-14)


def test_squeezed_vacuum_photon_number():
    m = _moments(fk.fock_squeeze(fk.fock_vacuum(1, 60), 0.5))
    assert m.mean_n == pytest.approx(math.sinh(0.5) ** 2, abs=1e-8)
    assert m.var_n == pytest.approx(2 * math.sinh(0.5) ** 2 * math.cosh(0.5) ** 2, abs=1e-8)
    assert m.cov[0, 0] == pytest.approx(0.5 * math.exp(1.0), abs=1e-8)
    assert m.cov[1, 1] == pytest.approx(0.5 * math.exp(-1.0), abs=1e-8)


def test_squeezed_vacuum_has_only_even_populations():
    pops = fk.fock_squeeze(fk.fock_vacuum(1, 40), 0.4).populations()
    assert pops[1::2].max() < 1e-20


def test_rotating_vacuum_does_nothing():
    v = fk.fock_vacuum(1, 20)
    np.testing.assert_allclose(fk.fock_rotate(v, 1.234).data, v.data, atol=1e-15)


def test_rotation_of_squeezed_state():
    s = fk.fock_rotate(fk.fock_squeeze(fk.fock_vacuum(1, 60), 0.3), math.pi / 2)
    m = _moments(s)
    assert m.cov[0, 0] == pytest.approx(0.5 * math.exp(-0.6), abs=1e-9)


def test_displace_then_undo():
    v = fk.fock_vacuum(1, 40)
    back = fk.fock_displace(fk.fock_displace(v, 1.0, -0.5), -1.0, 0.5)
    np.testing.assert_allclose(back.data, v.data, atol=1e-10)


def test_coherent_state_is_poissonian():
    alpha = 1.5
    s = fk.fock_displace(fk.fock_vacuum(1, 60), math.sqrt(2) * alpha, 0.0)
    m = _moments(s)
    assert m.mean_n == pytest.approx(alpha**2, abs=1e-8)
    assert m.var_n == pytest.approx(alpha**2, abs=1e-8)
    k = np.arange(10)
    want = np.exp(-(alpha**2)) * alpha ** (2 * k) / np.array([math.factorial(int(i)) for i in k])
    np.testing.assert_allclose(s.populations()[:10], want, atol=1e-12)


def test_loss_edges():
    s = fk.fock_displace(fk.fock_vacuum(1, 30), 1.0, 0.3)
    np.testing.assert_allclose(fk.fock_loss(s, 1.0).density(), s.density(), atol=1e-14)
    gone = fk.fock_loss(s, 0.0)
    assert gone.populations()[0] == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        fk.fock_loss(s, 1.2)


def test_kraus_loss_matches_ancilla_beamsplitter():
    s = fk.fock_squeeze(fk.fock_displace(fk.fock_vacuum(1, 24), 0.7, -0.4), 0.3)
    a = fk.fock_loss(s, 0.6)
    b = fk.fock_loss_ancilla(s, 0.6)
    np.testing.assert_allclose(a.density(), b.density(), atol=1e-12)


def test_lossy_squeezed_state_matches_engine():
    steps = [("squeeze", 0, 0.3), ("loss", 0, 0.9)]
    fock = _moments(fk.run_fock(steps, 1, 60))
    ref = fk.run_gaussian(steps)
    np.testing.assert_allclose(fock.cov, ref.cov, atol=1e-7)
    st_ = g.photon_stats(ref, 0)
    assert fock.mean_n == pytest.approx(st_.mean, abs=1e-7)
    assert fock.var_n == pytest.approx(st_.variance, abs=1e-7)


def test_two_mode_squeezed_vacuum():
    s = fk.fock_two_mode_squeeze(fk.fock_vacuum(2, 20), 0, 1, 0.3)
    m = _moments(s)
    assert m.mean_n == pytest.approx(2 * math.sinh(0.3) ** 2, abs=1e-10)
    assert m.mean_n == pytest.approx(0.185465, abs=1e-6)
    pops = s.populations().reshape(20, 20)
    # photons are created in pairs
    assert np.abs(pops - np.diag(np.diag(pops))).max() < 1e-20


def test_beamsplitter_on_single_photon_is_balanced():
    one = fk.FockState((6, 6), np.eye(36)[6])  # |1,0>
    out = fk.fock_beamsplitter(one, 0, 1, 1).populations().reshape(6, 6)
    assert out[1, 0] == pytest.approx(0.5, abs=1e-12)
    assert out[0, 1] == pytest.approx(0.5, abs=1e-12)


def test_beamsplitter_matches_engine():
    steps = [("displace", 0, 1.0, 0.2), ("squeeze", 1, 0.25), ("beamsplitter", 0, 1, -1)]
    err = fk.moment_error(_moments(fk.run_fock(steps, 2, 20)), fk.run_gaussian(steps, 2))
    assert err < 1e-8


# -- truncation guards ------------------------------------------------------

def test_trace_and_validity_preserved():
    steps = [("displace", 0, 1.2, -0.7), ("squeeze", 0, 0.4), ("loss", 0, 0.7), ("rotate", 0, 0.9)]
    s = fk.run_fock(steps, 1, 60)
    assert abs(s.trace() - 1.0) < 1e-9
    s.validate()


def test_leakage_raises_with_suggestion():
    with pytest.raises(fk.FockTruncationError) as exc:
        fk.fock_squeeze(fk.fock_vacuum(1, 10), 1.0)
    assert exc.value.required_dim == 20
    assert exc.value.leakage > fk.LEAKAGE_TOL
    assert "20" in str(exc.value)


def test_adaptive_dimension_escalates():
    steps = [("squeeze", 0, 1.0)]
    s = fk.run_fock_adaptive(steps, 1, start_dim=10)
    assert s.dims[0] > 10
    assert _moments(s).mean_n == pytest.approx(math.sinh(1.0) ** 2, abs=1e-8)
    with pytest.raises(fk.FockTruncationError):
        fk.run_fock_adaptive([("squeeze", 0, 3.0)], 1, start_dim=10, max_dim=40)


def test_unknown_step_rejected():
    with pytest.raises(ValueError):
        fk.run_fock([("twist", 0, 1.0)])
    with pytest.raises(ValueError):
        fk.run_gaussian([("twist", 0, 1.0)])


# -- oracle -----------------------------------------------------------------

def test_oracle_suite_passes():
    rep = fk.oracle_suite()
    assert len(rep.cases) >= 200
    assert rep.passed, rep.max_error
    assert rep.max_error < 1e-6


def test_oracle_suite_is_deterministic():
    a = fk.oracle_suite(n_cases=5, include_two_mode=False)
    b = fk.oracle_suite(n_cases=5, include_two_mode=False)
    assert [c.steps for c in a.cases] == [c.steps for c in b.cases]
    assert [c.error for c in a.cases] == [c.error for c in b.cases]


def test_oracle_detects_a_mismatch():
    steps = [("squeeze", 0, 0.4)]
    wrong = fk.run_gaussian([("squeeze", 0, -0.4)])
    assert fk.moment_error(_moments(fk.run_fock(steps, 1, 60)), wrong) > 0.1


@settings(max_examples=20, deadline=None)
@given(
    st.floats(-0.5, 0.5),
    st.floats(-math.pi, math.pi),
    st.floats(-1.0, 1.0),
    st.floats(-1.0, 1.0),
    st.floats(0.5, 1.0),
)
def test_random_single_mode_chain_matches_engine(r, phi, dc, ds, t):
    steps = [("displace", 0, dc, ds), ("squeeze", 0, r), ("rotate", 0, phi), ("loss", 0, t)]
    case = fk.check_chain(steps)
    assert case.passed, case.error


def test_two_mode_squeezed_vacuum_at_half_gain():
    s = fk.run_fock_adaptive([("tms", 0, 1, 0.5)], 2)
    assert s.dims == (40, 40)
    assert _moments(s).mean_n == pytest.approx(0.54308, abs=1e-5)


def test_squeezed_vacuum_number_variance_literal():
    m = _moments(fk.fock_squeeze(fk.fock_vacuum(1, 40), 0.5))
    assert (m.mean_n, m.var_n) == (pytest.approx(0.27154, abs=1e-5), pytest.approx(0.69055, abs=1e-5))
