from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from bnlab import upoly
from bnlab.exact import GF, QQ

F = GF(101)
coeff_lists = st.lists(st.integers(0, 100), min_size=1, max_size=9)


@given(coeff_lists)
@settings(max_examples=80)
def test_roots_match_exhaustive_search(f):
    f = upoly.trim(f)
    if upoly.deg(f) < 1:
        return
    found = upoly.roots(F, f)
    brute = {x for x in range(101) if upoly.evaluate(F, f, x) == 0}
    assert set(found) == brute
    for r, m in found.items():
        # multiplicity m: (x - r)^m divides f but not (x - r)^(m+1)
        g = f
        for _ in range(m):
            q, rem = upoly.divmod_(F, g, [F.neg(r), 1])
            assert not upoly.trim(rem)
            g = q
        assert upoly.evaluate(F, g, r) != 0


@given(coeff_lists, coeff_lists)
def test_division_identity(f, g):
    g = upoly.trim(g)
    if not g:
        return
    q, r = upoly.divmod_(F, f, g)
    assert upoly.trim(upoly.add(F, upoly.mul(F, q, g), r)) == upoly.trim(f)
    assert upoly.deg(r) < upoly.deg(g)


def test_rational_roots():
    f = [Fraction(-6), Fraction(11), Fraction(-6), Fraction(1)]  # (x-1)(x-2)(x-3)
    assert upoly.roots(QQ, f) == {Fraction(1): 1, Fraction(2): 1, Fraction(3): 1}
    assert upoly.roots(QQ, [Fraction(2), Fraction(0), Fraction(1)]) == {}


def test_squarefree():
    assert upoly.is_squarefree(F, [F.neg(1), 0, 1])
    assert not upoly.is_squarefree(F, upoly.mul(F, [1, 1], [1, 1]))
