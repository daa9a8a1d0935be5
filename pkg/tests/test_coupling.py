import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gaugelat.coupling import (CouplingModel, aa_parameters, bond_couplings, closed_form_AA, closed_form_SS,
                               coupling_strength, dimer_pair_distances, expanded_coupling, polar_diagonal,
                               polar_matrix, polar_parameters, rotation_terms, sa_inverse, sa_transform)
from gaugelat.errors import DecompositionFailure, InvalidParameter
from gaugelat.geometry import build_dimer_chain

angles = st.floats(-2 * np.pi, 2 * np.pi)


def test_coupling_strength_values():
    assert coupling_strength(0.0, CouplingModel(1, 1)) == 1.0
    assert coupling_strength(1.0, CouplingModel(1, 1)) == pytest.approx(np.exp(-1), rel=1e-15)
    assert coupling_strength(1.66, CouplingModel(1, 1.66)) == pytest.approx(0.36787944117144233, rel=1e-15)


def test_coupling_rejects_negative_distance():
    with pytest.raises(InvalidParameter):
        coupling_strength(-0.1)


@pytest.mark.parametrize("kw", [dict(delta0=0), dict(lam=-1), dict(cutoff="nearest"), dict(cutoff="radius")])
def test_model_validation(kw):
    with pytest.raises(InvalidParameter):
        CouplingModel(**kw)


def test_zero_angle_distances():
    L, d = 1.3, 0.2
    D = dimer_pair_distances(0.0, 0.0, L, d)
    assert D[0, 0] == pytest.approx(L) and D[1, 1] == pytest.approx(L)
    assert D[0, 1] == pytest.approx(np.sqrt(L**2 + 4 * d**2))
    assert D[1, 0] == pytest.approx(np.sqrt(L**2 + 4 * d**2))


@given(angles)
def test_antiparallel_rotation_terms(t):
    A, _ = rotation_terms(t, t + np.pi)
    s = np.array([-1, 1])
    np.testing.assert_allclose(A, 1 + np.outer(s, s), atol=1e-12)


@given(angles, angles, st.floats(0.5, 4.0), st.floats(0.0, 1.0))
def test_distances_match_coordinates(t1, t2, L, d):
    # coordinate-level oracle: two dimers built independently from the site law
    u = lambda t: np.array([np.sin(t), np.cos(t)])
    r1 = [np.zeros(2) - d * u(t1), np.zeros(2) + d * u(t1)]
    r2 = [np.array([L, 0.0]) - d * u(t2), np.array([L, 0.0]) + d * u(t2)]
    ref = np.array([[np.linalg.norm(a - b) for b in r2] for a in r1])
    np.testing.assert_allclose(dimer_pair_distances(t1, t2, L, d), ref, atol=1e-12)


def test_distances_match_geometry_module():
    lat = build_dimer_chain(7, 2, 1.4, 0.3)
    X = lat.positions().reshape(7, 2, 2)
    for n in range(6):
        ref = np.linalg.norm(X[n][:, None] - X[n + 1][None], axis=-1)
        np.testing.assert_allclose(dimer_pair_distances(lat.thetas[n], lat.thetas[n + 1], 1.4, 0.3), ref,
                                   atol=1e-12)


@given(st.floats(-3, 3), st.floats(-3, 3))
def test_sa_symmetric_bond(a, b):
    aa, as_, sa, ss = sa_transform(a, b, b, a)
    assert aa == pytest.approx(a + b, abs=1e-12) and ss == pytest.approx(a - b, abs=1e-12)
    assert as_ == 0 and sa == 0


def test_sa_uniform_bond():
    assert sa_transform(0.7, 0.7, 0.7, 0.7) == (1.4, 0.0, 0.0, 0.0)


@given(st.lists(st.floats(-5, 5), min_size=4, max_size=4))
def test_sa_involution(v):
    np.testing.assert_allclose(sa_inverse(*sa_transform(*v)), v, atol=1e-12)


def test_sa_fig1b_bond_oracle():
    N, p, L, d = 201, 7, 2.8, 0.35
    m = CouplingModel(1.0, 1.0)
    t1, t2 = 0.0, 2 * np.pi * p / (N - 1)
    D = np.exp(-dimer_pair_distances(t1, t2, L, d))
    U = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    ref = U.T @ D @ U
    got = bond_couplings(t1, t2, L, d, m)
    np.testing.assert_allclose([got.AA, got.AS, got.SA, got.SS], ref.ravel(), atol=1e-15)


def test_expansion_is_second_order():
    t1, t2 = 0.3, 0.9
    errs = []
    for d in (0.04, 0.02, 0.01):
        exact = np.exp(-dimer_pair_distances(t1, t2, 1.0, d)) / np.exp(-1.0)
        errs.append(np.abs(expanded_coupling(t1, t2, 1.0, d, 1.0) - exact).max())
    assert errs[0] / errs[1] > 6 and errs[1] / errs[2] > 6  # third order remainder


def test_closed_form_ss_zero_frequency():
    L, d = 1.66, 0.1
    np.testing.assert_allclose(closed_form_SS(np.arange(1, 9), 0.0, L, d, L, 1.0), 2 * d**2 / L**2)


def _exact_sa(N, p, L, d, lam):
    m = CouplingModel(1.0, lam)
    th = 2 * np.pi * p * np.arange(N) / (N - 1)
    return [bond_couplings(th[n], th[n + 1], L, d, m) for n in range(N - 1)]


def test_closed_form_ss_against_exact():
    N, p, L, d = 201, 9, 1.66, 0.1
    om = 2 * np.pi * p / (N - 1)
    exact = np.array([b.SS for b in _exact_sa(N, p, L, d, L)])
    cf = closed_form_SS(np.arange(1, N), om, L, d, L, np.exp(-1.0))
    amp = 2 * d**2 / L**2 * np.exp(-1.0)
    # relative to the modulation amplitude (the couplings cross zero)
    assert np.abs(cf - exact).max() / amp < 0.02


def test_closed_form_aa_zero_frequency():
    L, d, lam = 2.8, 0.35, 1.0
    a, beta, g, amp = aa_parameters(L, d, lam)
    np.testing.assert_allclose(closed_form_AA(np.arange(1, 6), 0.0, L, d, lam, 1.0),
                               g - beta * a**2 * (beta + 1))


def test_aa_amplitude_fig1b():
    assert aa_parameters(2.8, 0.35, 1.0)[3] == pytest.approx(0.08, rel=0.01)


def test_aa_readings_against_exact():
    # the d/L, L/lam reading reproduces the exact couplings; the L/d, d/lam one does not
    N, p, L, d = 201, 10, 2.8, 0.35
    om = 2 * np.pi * p / (N - 1)
    exact = np.array([b.AA for b in _exact_sa(N, p, L, d, 1.0)])
    n = np.arange(1, N)
    rel = {}
    for reading in ("d/L", "L/d"):
        _, _, g, amp = aa_parameters(L, d, 1.0, reading)
        cf = g * (1 - amp * np.cos(om) * np.cos(om * (2 * n - 1))) * np.exp(-L)
        rel[reading] = np.abs(cf / exact - 1).max()
    assert rel["d/L"] < 0.01
    assert rel["L/d"] > 1.0


def test_closed_form_aa_converges():
    N, p, L = 101, 6, 2.8
    om = 2 * np.pi * p / (N - 1)
    errs = []
    for d in (0.4, 0.2, 0.1):
        exact = np.array([b.AA for b in _exact_sa(N, p, L, d, 1.0)])
        cf = closed_form_AA(np.arange(1, N), om, L, d, 1.0, np.exp(-L))
        errs.append(np.abs(cf / exact - 1).max())
    assert errs[0] > errs[1] > errs[2]


def test_closed_form_warns_large_alpha():
    with pytest.warns(UserWarning):
        closed_form_AA(1, 0.1, 1.0, 0.5, 1.0, 1.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        closed_form_AA(1, 0.1, 2.8, 0.35, 1.0, 1.0)


def test_polar_pure_rotation():
    phi0 = 0.7
    R = polar_matrix(phi0, 0, 0)
    phi, th, chi, s = polar_parameters(R)
    assert (phi, th, chi, s) == pytest.approx((phi0, 0, 0, 1), abs=1e-12)


def test_polar_pure_stretch():
    phi, th, chi, s = polar_parameters(np.diag([np.exp(0.4), np.exp(-0.4)]))
    assert (phi, th, chi, s) == pytest.approx((0, 0.4, 0, 1), abs=1e-12)


@given(st.floats(-3, 3), st.floats(-1.5, 1.5), st.floats(-1.5, 1.5), st.floats(0.1, 10))
def test_polar_roundtrip(phi, th, chi, s):
    h = polar_matrix(phi, th, chi, s)
    np.testing.assert_allclose(polar_matrix(*polar_parameters(h)), h, atol=1e-10 * np.abs(h).max())


def test_polar_roundtrip_chain_bonds():
    # only positive-determinant bonds admit rotation x positive factor;
    # the others must be refused, never silently reflected
    done = refused = 0
    for b in _exact_sa(31, 4, 1.66, 0.3, 1.66):
        h = np.array([[b.d11, b.d12], [b.d21, b.d22]])
        if np.linalg.det(h) > 0:
            np.testing.assert_allclose(polar_matrix(*polar_parameters(h)), h, atol=1e-10)
            done += 1
        else:
            with pytest.raises(DecompositionFailure):
                polar_parameters(h)
            refused += 1
    assert done > 5 and refused > 5


def test_polar_failures():
    with pytest.raises(DecompositionFailure):
        polar_parameters(np.ones((2, 2)))
    with pytest.raises(DecompositionFailure):
        polar_parameters(np.diag([1.0, -1.0]))


def test_polar_diagonal_closed_form():
    b = _exact_sa(31, 4, 1.66, 0.3, 1.66)[3]
    U = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    h = U @ np.array([[b.d11, b.d12], [b.d21, b.d22]]) @ U
    import scipy.linalg
    _, P = scipy.linalg.polar(h, side="right")
    np.testing.assert_allclose(polar_diagonal(b.d11, b.d12, b.d21, b.d22), np.diag(P), rtol=1e-10)
