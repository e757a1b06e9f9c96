from math import comb

import numpy as np
import pytest

from bnlab import caselab
from bnlab.exact import Matrix, mat_det
from bnlab.models import pencil_through


@pytest.fixture(scope="module")
def g4(standard):
    C = standard("quintic_g4")
    M = caselab.canonical_model(C)
    return C, M, caselab.genus4_system(M)


@pytest.fixture(scope="module")
def g5(standard):
    C = standard("sextic_g5")
    M = caselab.canonical_model(C)
    return C, M, caselab.genus5_net(M)


@pytest.mark.parametrize("name", ["quartic_g3", "quintic_g4", "sextic_g5", "sextic_g6"])
def test_quadric_count_matches_riemann_roch(standard, name):
    # projective normality: quadrics through the canonical curve = dim Sym^2 - h0(2K)
    C = standard(name)
    M = caselab.canonical_model(C)
    expected = comb(C.genus + 1, 2) - C.h0(C.canonical_divisor() * 2)
    assert len(caselab.quadrics_through_canonical(M)) == expected
    for q in caselab.quadrics_through_canonical(M):
        assert all(q.eval_raw(p) == 0 for p in M.points)


def test_genus4_cubic_system(g4):
    C, M, data = g4
    assert data.dim_quadrics == 1
    assert data.dim_cubics == comb(6, 3) - C.h0(C.canonical_divisor() * 3) == 5
    assert data.dim_linear_times_Q == 4
    assert data.Q.is_homogeneous() and data.Q.degree() == 2


def test_cubic_threefold_and_node(g4):
    C, M, data = g4
    rng = np.random.default_rng(21)
    res = caselab.cubic_threefold(data, rng)
    assert res["nullspace_dim"] == 1
    assert res["quadric_nullspace_dim"] == 0
    assert res["holdout_zero"]
    T = res["T"]
    assert T.degree() == 3 and T.is_homogeneous()
    # a second, independent fit agrees up to scalar
    again = caselab.cubic_threefold(data, np.random.default_rng(99))["T"]
    assert caselab._proportional(T.field, T, again)
    node = caselab.node_check(T, data, M, rng)
    assert node["images_agree"] and node["value"] == 0
    assert node["gradient_zero"] and node["hessian_nonzero"]
    assert node["tangent_cone_degree"] == 2
    assert node["cone_proportional_to_Q"]


def test_alpha_quartic_properties(g4):
    C, M, data = g4
    res = caselab.alpha_checks(data, M, np.random.default_rng(4))
    assert res["vanish_on_curve"]
    assert res["q2_difference"]
    assert res["linear_in_direction"]
    assert res["zero_direction_zero"]


def test_node_pencils_are_trigonal(g4):
    C, _, _ = g4
    K = C.canonical_divisor()
    for pt, _m in C.singular_points:
        D = pencil_through(C, pt)
        assert D.degree == 3 and C.h0(D) == 2
        assert C.h0(K - D) == 2
    for D in caselab.trigonal_pencils_g4(C, None, pool_size=15, max_triples=150):
        assert C.h0(D) == 2 and C.h0(K - D) == 2


def test_discriminant_quintic(g5):
    C, M, (quads, net) = g5
    rng = np.random.default_rng(8)
    disc = caselab.discriminant_quintic(net, rng)
    gamma = disc["gamma"]
    assert disc["degree"] == 5 and disc["homogeneous"]
    F = net[3]
    for _ in range(10):
        lam = tuple(F.random(rng) for _ in range(3))
        assert gamma.eval_raw(lam) == mat_det(caselab.net_pencil(net, lam))
    assert disc["zeros"]
    assert all(r == 4 for r in disc["ranks"])


def test_discriminant_transforms_by_det_squared(g5):
    _, _, (_, net) = g5
    F = net[3]
    rng = np.random.default_rng(10)
    while True:
        P = Matrix._raw(F, [[F.random(rng) for _ in range(5)] for _ in range(5)], 5)
        if mat_det(P) != 0:
            break
    gamma = caselab.discriminant_quintic(net, rng)["gamma"]
    conj = caselab.conjugate_net(net, P)
    gamma2 = caselab.discriminant_quintic(conj, rng)["gamma"]
    d2 = F.mul(mat_det(P), mat_det(P))
    assert gamma2 == gamma.scale(d2)
    quads_zero = caselab.discriminant_quintic(conj, rng)["zeros"]
    assert all(gamma.eval_raw(z) == 0 for z in quads_zero)


def test_rank_three_member_is_singular_point_of_discriminant(g5):
    _, _, (_, net) = g5
    F = net[3]
    rng = np.random.default_rng(12)
    A0 = [[F.one if (i == j and i < 3) else F.zero for j in range(5)] for i in range(5)]
    synthetic = (A0, net[1], net[2], F)
    gamma = caselab.discriminant_quintic(synthetic, rng)["gamma"]
    res = caselab.discriminant_point_check(gamma, synthetic, (1, 0, 0))
    assert res == {"value_zero": True, "gradient_zero": True, "rank": 3}


def test_tetragonal_configuration(standard):
    cfg = caselab.tetragonal_config(standard("sextic_g6"))
    assert cfg.h0 == [2] * 5
    assert all(cfg.relation)
    assert cfg.omega0_dims == [1] * 5
    assert all(x.degree == 4 for x in cfg.x)


def test_trigonal_omega(standard):
    res = caselab.trigonal_omega(standard("trigonal_g6"))
    assert res["h0_L"] == 2
    assert res["deg_D"] == 4 and res["h0_D"] == 2
    assert res["omega0_dim"] == 2


def test_plane_quintic_omega(standard):
    res = caselab.plane_quintic_omega(standard("quintic_g6"))
    assert res["omega0_dim"] == 1
    assert res["generator_prop_eval_p"]
    assert res["p_is_base_point"]
    assert res["eval_q_index"] == 1


def test_wrong_genus_rejected(standard):
    with pytest.raises(Exception):
        caselab.tetragonal_config(standard("quintic_g4"))
    with pytest.raises(Exception):
        caselab.plane_quintic_omega(standard("sextic_g6"))
