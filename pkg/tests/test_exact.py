from fractions import Fraction
from math import comb

import pytest
import sympy
from sympy.polys.domains import GF as SGF
from sympy.polys.matrices import DomainMatrix
from hypothesis import given, settings
from hypothesis import strategies as st

from bnlab.exact import (
    GF, QQ, FieldMismatch, FieldScalar, Matrix, MultiPoly, bareiss_rank, echelon, homogeneous_monomials,
    mat_det, mat_nullspace, mat_rank, solve_left, _echelon_generic, _echelon_modp_numpy,
)

P = 101
F = GF(P)

small_rows = st.integers(1, 6).flatmap(
    lambda c: st.lists(st.lists(st.integers(0, P - 1), min_size=c, max_size=c), min_size=1, max_size=6)
)
rat = st.fractions(min_value=-20, max_value=20, max_denominator=7)
rat_rows = st.integers(1, 5).flatmap(lambda c: st.lists(st.lists(rat, min_size=c, max_size=c), min_size=1, max_size=5))


def test_prime_field_rejects_composite():
    with pytest.raises(ValueError):
        GF(1001)


def test_residues_and_fractions_are_normalized():
    assert F(-1) == P - 1
    assert F(Fraction(1, 2)) * 2 % P == 1
    assert QQ("6/4") == Fraction(3, 2)


def test_mixed_field_arithmetic_raises():
    with pytest.raises(FieldMismatch):
        FieldScalar(GF(5), 1) + FieldScalar(GF(7), 1)


@given(st.integers(1, P - 1), st.integers(0, P - 1), st.integers(0, P - 1))
def test_field_axioms_mod_p(a, b, c):
    assert F.mul(a, F.inv(a)) == 1
    assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    assert F.sub(F.add(b, c), c) == b


@given(small_rows)
@settings(max_examples=60)
def test_rank_matches_sympy_mod_p(rows):
    m = Matrix(F, rows)
    dm = DomainMatrix([[SGF(P)(x) for x in r] for r in rows], (len(rows), len(rows[0])), SGF(P))
    assert mat_rank(m) == dm.rank()


@given(small_rows)
@settings(max_examples=60)
def test_numpy_and_generic_elimination_agree(rows):
    ncols = len(rows[0])
    a = _echelon_modp_numpy([list(r) for r in rows], ncols, P)
    b = _echelon_generic(F, [list(r) for r in rows], ncols)
    assert [list(map(int, r)) for r in a[0]] == [list(r) for r in b[0]]
    assert list(a[1]) == list(b[1])


@given(small_rows)
@settings(max_examples=60)
def test_nullspace_is_annihilated_and_complementary(rows):
    m = Matrix(F, rows)
    N = mat_nullspace(m)
    assert (m @ N).is_zero() if N.ncols else True
    assert mat_rank(m) + N.ncols == m.ncols


@given(rat_rows)
@settings(max_examples=60)
def test_bareiss_rank_matches_sympy_over_q(rows):
    assert bareiss_rank(rows, len(rows[0])) == sympy.Matrix(rows).rank()
    assert mat_rank(Matrix(QQ, rows)) == sympy.Matrix(rows).rank()


@given(st.integers(1, 5).flatmap(lambda n: st.lists(st.lists(st.integers(0, P - 1), min_size=n, max_size=n), min_size=n, max_size=n)))
@settings(max_examples=60)
def test_determinant_matches_sympy(rows):
    assert mat_det(Matrix(F, rows)) == int(sympy.Matrix(rows).det()) % P


def test_rank_two_example():
    rows = [[1, 2, 3, 4, 5, 6, 7], [2, 4, 6, 8, 10, 12, 14], [0, 1, 0, 1, 0, 1, 0],
            [1, 3, 3, 5, 5, 7, 7], [3, 7, 9, 13, 15, 19, 21]]
    for field in (F, QQ):
        m = Matrix(field, rows)
        assert mat_rank(m) == 2
        N = mat_nullspace(m)
        assert N.ncols == 5
        assert (m @ N).is_zero()


def test_solve_left_membership():
    basis = [[1, 0, 2], [0, 1, 3]]
    c = solve_left(F, basis, [2, 5, F.add(4, 15)], 3)
    assert c == [2, 5]
    assert solve_left(F, basis, [0, 0, 1], 3) is None


@pytest.mark.parametrize("n,d", [(3, 2), (3, 6), (4, 3), (5, 3), (8, 4)])
def test_monomial_counts(n, d):
    mons = homogeneous_monomials(n, d)
    assert len(mons) == comb(n + d - 1, d)
    assert mons == sorted(mons, reverse=True)


def test_eight_variable_quartics():
    assert len(homogeneous_monomials(8, 4)) == 330


polys = st.dictionaries(
    st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3)), st.integers(0, P - 1), max_size=6
).map(lambda t: MultiPoly(F, 3, t))
points = st.tuples(st.integers(0, P - 1), st.integers(0, P - 1), st.integers(0, P - 1))


@given(polys, polys, points)
def test_evaluation_is_a_ring_homomorphism(f, g, x):
    assert (f * g).eval_raw(x) == F.mul(f.eval_raw(x), g.eval_raw(x))
    assert (f + g).eval_raw(x) == F.add(f.eval_raw(x), g.eval_raw(x))


@given(polys, polys, st.integers(0, 2))
def test_partial_obeys_leibniz(f, g, i):
    assert (f * g).partial(i) == f.partial(i) * g + f * g.partial(i)


@given(polys)
def test_vector_round_trip(f):
    if f.is_zero() or not f.is_homogeneous():
        return
    mons = homogeneous_monomials(3, f.degree())
    assert MultiPoly.from_vector(F, mons, f.to_vector(mons)) == f


def test_substitution_matches_evaluation():
    f = MultiPoly(F, 3, {(2, 1, 0): 3, (0, 0, 3): 5, (1, 1, 1): 7})
    images = [MultiPoly(F, 2, {(1, 0): 1, (0, 1): 2}), MultiPoly(F, 2, {(0, 1): 1}), MultiPoly(F, 2, {(1, 0): 4})]
    g = f.substitute_linear(images)
    for s, t in [(1, 2), (5, 9), (0, 7)]:
        assert g.eval_raw((s, t)) == f.eval_raw((F.add(s, 2 * t), t, F.mul(4, s)))


def test_echelon_is_reduced():
    m = Matrix(F, [[0, 2, 4], [1, 1, 1], [1, 3, 5]])
    red, piv = echelon(m)
    assert piv == [0, 1]
    assert red[0][0] == 1 and red[1][1] == 1 and red[0][1] == 0
