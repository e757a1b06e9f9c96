import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bnlab import theta as th
from bnlab.cli import DEFAULT_BRANCH

G2_BRANCH = [-3.0, -1.5, -0.5, 0.7, 1.9, 3.2]
G4_BRANCH = [-5.0, -4.0, -3.0, -2.0, -1.0, 1.0, 2.0, 3.0, 4.0, 5.0]


@pytest.fixture(scope="module")
def jac3():
    return th.hyperelliptic_periods(DEFAULT_BRANCH)


@pytest.fixture(scope="module")
def jac2():
    return th.hyperelliptic_periods(G2_BRANCH)


def brute_theta(tau, z, char, N):
    tau = np.atleast_2d(np.asarray(tau, dtype=complex))
    g = tau.shape[0]
    eps, delta = np.array(char.eps, float), np.array(char.delta, float)
    total = 0j
    for n in itertools.product(range(-N, N + 1), repeat=g):
        v = np.array(n, float) + eps
        total += np.exp(np.pi * 1j * v @ tau @ v + 2j * np.pi * v @ (np.asarray(z) + delta))
    return total


TAU2 = np.array([[0.3 + 1.1j, 0.2 + 0.4j], [0.2 + 0.4j, -0.1 + 0.9j]])


@settings(max_examples=25, deadline=None)
@given(re=st.floats(-1, 1), im=st.floats(-0.5, 0.5), t=st.floats(0.6, 2.0), idx=st.integers(0, 3))
def test_genus1_against_brute_force(re, im, t, idx):
    tau = [[0.2 + 1j * t]]
    ch = th.ThetaChar.from_index(1, idx)
    z = [re + 1j * im]
    assert abs(th.theta(tau, z, ch) - brute_theta(tau, z, ch, 40)) < 1e-12


@pytest.mark.parametrize("idx", range(16))
def test_genus2_against_brute_force(idx):
    ch = th.ThetaChar.from_index(2, idx)
    z = np.array([0.3 - 0.2j, -0.1 + 0.15j])
    assert abs(th.theta(TAU2, z, ch) - brute_theta(TAU2, z, ch, 18)) < 1e-11


def test_odd_characteristics_vanish_at_origin():
    for idx in range(16):
        ch = th.ThetaChar.from_index(2, idx)
        val = th.theta(TAU2, [0, 0], ch)
        assert (abs(val) < 1e-13) == (ch.parity == 1)
    assert sum(th.ThetaChar.from_index(3, i).parity for i in range(64)) == 28


def test_quasi_periodicity():
    z = np.array([0.21 + 0.1j, -0.33 + 0.05j])
    base = th.theta(TAU2, z)
    for i in range(2):
        e = np.eye(2)[i]
        assert abs(th.theta(TAU2, z + e) - base) < 1e-12
        factor = np.exp(-np.pi * 1j * TAU2[i, i] - 2j * np.pi * z[i])
        assert abs(th.theta(TAU2, z + TAU2 @ e) - factor * base) < 1e-12


def test_tolerance_is_honest():
    rm = th.RiemannMatrix(TAU2)
    z = [0.4 + 0.3j, 0.1 - 0.2j]
    coarse = th.theta(rm, z, tol=1e-6)
    fine = brute_theta(TAU2, z, th.ThetaChar.zero(2), 18)
    scale = np.exp(np.pi * np.imag(z) @ rm.Yinv @ np.imag(z))
    assert abs(coarse - fine) <= 1e-6 * scale
    assert rm.radius(1e-14) > rm.radius(1e-6)


def test_invalid_inputs():
    with pytest.raises(ValueError):
        th.RiemannMatrix([[1j, 0.5], [0.2, 1j]])
    with pytest.raises(ValueError):
        th.RiemannMatrix([[1j, 0], [0, -1j]])
    with pytest.raises(ValueError):
        th.theta(TAU2, [0, 0], tol=1e-16)
    with pytest.raises(ValueError):
        th.ThetaChar((0.25,), (0,))
    with pytest.raises(ValueError):
        th.hyperelliptic_periods([0, 1, 1, 2])


def test_kummer_symmetries():
    rng = np.random.default_rng(1)
    z = rng.normal(size=2) * 0.3 + 1j * rng.normal(size=2) * 0.2
    k = th.theta2_vector(TAU2, z)
    assert th.projective_distance(th.theta2_vector(TAU2, -z), k) < 1e-12
    for m in itertools.product((0, 1), repeat=2):
        m = np.array(m)
        assert np.allclose(th.theta2_vector(TAU2, z + m), k, atol=1e-12)
        assert th.projective_distance(th.theta2_vector(TAU2, z + TAU2 @ m), k) < 1e-12
        signs = np.array([(-1) ** int(np.dot(s, m)) for s in itertools.product((0, 1), repeat=2)])
        assert np.allclose(th.theta2_vector(TAU2, z + m / 2), signs * k, atol=1e-12)


def test_full_period_shift_carries_no_sign_pattern():
    # the sign pattern diag((-1)^{sigma.n}) does not apply to z + tau n
    z = np.array([0.17 + 0.05j, -0.12 + 0.08j])
    k = th.theta2_vector(TAU2, z)
    n = np.array([1, 0])
    signs = np.array([(-1) ** int(np.dot(s, n)) for s in itertools.product((0, 1), repeat=2)])
    assert th.projective_distance(th.theta2_vector(TAU2, z + TAU2 @ n), signs * k) > 0.1


def test_period_matrix_properties(jac3):
    tau = jac3.tau
    assert np.allclose(tau, tau.T, atol=1e-10)
    assert np.all(np.linalg.eigvalsh(tau.imag) > 0)
    coarse = th.hyperelliptic_periods(DEFAULT_BRANCH, tol=1e-6)
    assert np.max(np.abs(coarse.tau - tau)) < 1e-5


@pytest.mark.parametrize("branch", [[-1.0, 0.0, 1.0, 2.5], [-2.0, -0.3, 0.4, 7.0], [0.0, 1.0, 2.0, 3.0]])
def test_elliptic_j_invariant(branch):
    data = th.hyperelliptic_periods(branch)
    jt = th.j_invariant_from_tau(data.tau)
    jb = th.j_invariant_from_branch(branch)
    assert abs(jt - jb) <= 1e-9 * max(1.0, abs(jb))


def lattice_coordinates(rm, z):
    n = np.linalg.solve(rm.Y, z.imag)
    m = z.real - rm.tau.real @ n
    return m, n


def test_abel_jacobi_involution_pairs(jac3):
    assert np.allclose(th.abel_jacobi(jac3, []), 0)
    for x in (-5.5, -3.4, 0.2, 2.6, 6.0):
        z = th.abel_jacobi(jac3, [(x, 1), (x, -1)])
        m, n = lattice_coordinates(jac3.rm, z)
        assert np.allclose(m, np.round(m), atol=1e-9) and np.allclose(n, np.round(n), atol=1e-9)


def test_abel_jacobi_branch_points_are_half_periods(jac3):
    # images of the branch points approach half-periods
    for e in DEFAULT_BRANCH[1:]:
        z = th.abel_jacobi(jac3, [(e + 1e-6, 1)])
        m, n = lattice_coordinates(jac3.rm, 2 * z)
        assert np.allclose(m, np.round(m), atol=1e-2) and np.allclose(n, np.round(n), atol=1e-2)


def test_abel_jacobi_rejects_branch_points(jac3):
    with pytest.raises(ValueError):
        th.abel_jacobi(jac3, [(DEFAULT_BRANCH[2], 1)])
    with pytest.raises(ValueError):
        th.abel_jacobi(jac3, [(0.0, 2)])


def test_riemann_vanishing_genus2(jac2):
    divisors = [[(x, s)] for x, s in ((-2.2, 1), (0.1, -1), (2.5, 1), (4.0, -1))]
    hits = th.riemann_vanishing(jac2, divisors)
    assert len(hits) == 1 and hits[0].parity == 1


@pytest.mark.parametrize("index", range(0, 64, 7))
def test_fay_and_quadrisecant(jac3, index):
    pts = th.random_points(jac3, 4, np.random.default_rng(index))
    assert th.fay_residual(jac3, pts, index)["residual"] <= 1e-7
    q = th.quadrisecant_residual(jac3, pts, index)
    assert q["residual"] <= 1e-7 and q["sigma2"] >= 1e-3


def test_fay_negative_control(jac3):
    rng = np.random.default_rng(5)
    quads = [th.random_points(jac3, 4, rng) for _ in range(8)]
    assert th.negative_control(jac3, quads)["median"] >= 1e-3
    assert th.negative_control(jac3, quads, quad=True)["median"] >= 1e-3


@pytest.mark.parametrize("g,expected", [(1, 2), (2, 5), (3, 15)])
def test_heisenberg_orbits(g, expected):
    orbits = th.heisenberg_orbits(g)
    assert len(orbits) == expected == th.heisenberg_dimension_oracle(g)
    for elem in th.heisenberg_generators(g):
        for poly in orbits:
            assert th.apply_heisenberg(g, elem, poly) == poly


def test_heisenberg_invariants_are_even_on_kummer():
    # invariant quartics take equal values at z and at z + half-periods
    from bnlab.theta import _eval_with_grad, _poly_arrays

    arrays = _poly_arrays(th.heisenberg_orbits(2), 4)
    z = np.array([0.13 + 0.04j, -0.2 + 0.07j])
    v0, _ = _eval_with_grad(arrays, th.theta2_vector(TAU2, z))
    for m in itertools.product((0, 1), repeat=2):
        v, _ = _eval_with_grad(arrays, th.theta2_vector(TAU2, z + np.array(m) / 2))
        assert np.allclose(v, v0, rtol=1e-10)


def test_coble_quartic(jac3):
    res = th.coble_solve(jac3.rm, np.random.default_rng(3))
    assert res["nullspace_dim"] >= 1
    assert res["max_value_residual"] <= 1e-6
    assert res["max_gradient_residual"] <= 1e-6


def test_gamma00_ranks(jac3, jac2):
    assert th.gamma00_rank(jac3.rm)["rank"] == 7
    assert th.gamma00_rank(jac2.rm)["rank"] == 4


def test_gamma00_genus4_extended_precision():
    data = th.hyperelliptic_periods(G4_BRANCH)
    res = th.gamma00_rank(data.rm, precision=30)
    assert (res["rows"], res["cols"], res["rank"]) == (11, 16, 11)
    assert th.gamma00_rank(data.rm)["rank"] == 11
    rng = np.random.default_rng(0)
    for vec in res["nullspace"][:3]:
        assert th.gamma00_member(vec, data.rm)
    assert not th.gamma00_member(rng.normal(size=16) + 1j * rng.normal(size=16), data.rm)


def test_gamma00_rank_is_symplectic_invariant(jac3):
    rng = np.random.default_rng(17)
    for _ in range(3):
        S = th.random_symplectic(3, rng)
        tau = th.symplectic_transform(jac3.tau, S)
        assert th.gamma00_rank(tau)["rank"] == 7


def test_kummer_functional_not_in_gamma00(jac3):
    rng = np.random.default_rng(2)
    a = rng.normal(size=3) * 0.2 + 1j * rng.normal(size=3) * 0.1
    assert not th.gamma00_member(th.kummer_functional(jac3.rm, a), jac3.rm)
