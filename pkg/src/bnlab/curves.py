"""Plane curves with ordinary singularities and Riemann-Roch spaces by adjoints.

A curve is a homogeneous ternary form ``F`` of degree ``d`` together with the
list of its singular points, each an ordinary ``m``-fold point whose tangent
directions are rational.  Divisors live on the normalization: a ``Place`` is
either a smooth rational point (``branch == 0``) or one branch over a singular
point.  Every local computation goes through a power series parametrization of
the place, so orders of forms at branches and at smooth points are handled by
the same code.

Riemann-Roch spaces use adjoint forms.  A fixed adjoint ``A0`` of degree
``d - 3`` is built as a product of lines whose intersections with the curve
are all rational; it defines the reference canonical divisor
``K0 = div(A0) - E`` where ``E`` is the conductor.  For a divisor ``D`` the
denominator is ``H = A0**a * (lines through points of D)``; numerators are the
forms ``G`` of the same degree with ``div(G) >= div(H) - D``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from . import upoly
from .exact import (
    GF,
    QQ,
    Matrix,
    MultiPoly,
    echelon,
    field_from_json,
    homogeneous_monomials,
    independent_rows,
    mat_nullspace,
    mat_rank,
)


class CurveError(ValueError):
    pass


class SingularityMismatch(CurveError):
    pass


class SmoothPointOnSingularity(CurveError):
    pass


class BudgetExhausted(CurveError):
    pass


class SearchFailure(CurveError):
    pass


class ProductNotExpressible(CurveError):
    pass


def normalize_point(F, pt) -> tuple:
    pt = [F(x) for x in pt]
    for x in pt:
        if x != 0:
            inv = F.inv(x)
            return tuple(F.mul(inv, y) for y in pt)
    raise ValueError("zero vector is not a projective point")


@dataclass(frozen=True, order=True)
class Place:
    """A rational place of the normalization: a point and a branch index."""

    point: tuple
    branch: int = 0

    def __repr__(self):
        b = f"/{self.branch}" if self.branch else ""
        return f"({':'.join(str(x) for x in self.point)}){b}"


class Divisor:
    """Finite formal sum of places with nonzero integer multiplicities."""

    __slots__ = ("_terms", "_key")

    def __init__(self, terms=None):
        acc: dict = {}
        items = terms.items() if isinstance(terms, dict) else (terms or ())
        for place, k in items:
            if not isinstance(place, Place):
                raise TypeError("divisor support must consist of Place objects")
            acc[place] = acc.get(place, 0) + int(k)
        self._terms = {p: k for p, k in sorted(acc.items()) if k}
        self._key = tuple(self._terms.items())

    @classmethod
    def of_places(cls, places: Iterable[Place]):
        return cls([(p, 1) for p in places])

    def items(self):
        return list(self._terms.items())

    def support(self):
        return list(self._terms)

    def __getitem__(self, place):
        return self._terms.get(place, 0)

    @property
    def degree(self) -> int:
        return sum(self._terms.values())

    def __len__(self):
        return len(self._terms)

    def __add__(self, other):
        return Divisor(list(self._terms.items()) + list(other._terms.items()))

    def __neg__(self):
        return Divisor([(p, -k) for p, k in self._terms.items()])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, n: int):
        return Divisor([(p, n * k) for p, k in self._terms.items()])

    __rmul__ = __mul__

    def positive(self):
        return Divisor([(p, k) for p, k in self._terms.items() if k > 0])

    def negative(self):
        return Divisor([(p, -k) for p, k in self._terms.items() if k < 0])

    def is_effective(self) -> bool:
        return all(k > 0 for k in self._terms.values())

    def __eq__(self, other):
        return isinstance(other, Divisor) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        if not self._terms:
            return "Divisor(0)"
        return "Divisor(" + " + ".join(f"{k}*{p!r}" for p, k in self._terms.items()) + ")"


# ---------------------------------------------------------------------------
# truncated power series


def _ser_mul(F, a, b, n):
    out = [0] * n
    if F.kind == "prime":
        for i, x in enumerate(a[:n]):
            if x:
                for j in range(min(len(b), n - i)):
                    out[i + j] += x * b[j]
        return [v % F.p for v in out]
    out = [F.zero] * n
    for i, x in enumerate(a[:n]):
        if x:
            for j in range(min(len(b), n - i)):
                out[i + j] += x * b[j]
    return out


class _LocalBranch:
    """Power series parametrization of one place in an affine chart.

    The chart sets coordinate ``chart`` to 1; ``(u, v)`` are the two remaining
    coordinates in index order.  For a non-vertical tangent the parameter is
    ``t = u - u0`` and ``v = v0 + t*s(t)``; for a vertical one the roles swap.
    ``s`` solves ``g(t, s) = 0`` where ``g`` is the translated equation with
    ``t**m`` divided out.
    """

    def __init__(self, F, chart, u0, v0, m, gterms, s0, gs0, vertical):
        self.F = F
        self.chart = chart
        self.u0, self.v0 = u0, v0
        self.m = m
        self.gterms = gterms
        self.s0 = s0
        self.gs0_inv = F.inv(gs0)
        self.vertical = vertical
        self._s = [s0]
        self._coords: dict = {}

    def s_series(self, n):
        F = self.F
        if len(self._s) >= n:
            return self._s[:n]
        s = self._s + [F.zero] * (n - len(self._s))
        maxb = max(b for (_, b) in self.gterms)
        # each sweep fixes at least one more coefficient
        for _ in range(n - len(self._s) + 1):
            powers = [[F.one] + [F.zero] * (n - 1)]
            for _ in range(maxb):
                powers.append(_ser_mul(F, powers[-1], s, n))
            val = [F.zero] * n
            for (a, b), c in self.gterms.items():
                if a >= n:
                    continue
                pb = powers[b]
                for k in range(n - a):
                    if pb[k] != 0:
                        val[a + k] = F.add(val[a + k], F.mul(c, pb[k]))
            if all(x == 0 for x in val):
                break
            s = [F.sub(x, F.mul(self.gs0_inv, y)) for x, y in zip(s, val)]
        self._s = s
        return s[:n]

    def coords(self, n):
        """Three coordinate series, truncated to ``n`` terms."""
        hit = self._coords.get(n)
        if hit is not None:
            return hit
        F = self.F
        s = self.s_series(n)
        lin = [F.zero] * n
        dep = [F.zero] * n
        if n > 1:
            lin[1] = F.one
        for k in range(1, n):
            dep[k] = s[k - 1]
        u, v = (dep, lin) if self.vertical else (lin, dep)
        if n:
            u[0] = self.u0
            v[0] = self.v0
        others = [i for i in range(3) if i != self.chart]
        out = [None, None, None]
        out[self.chart] = [F.one] + [F.zero] * (n - 1)
        out[others[0]] = u
        out[others[1]] = v
        self._coords[n] = out
        return out


def _translated_affine(F_poly: MultiPoly, chart: int, pt) -> dict:
    """Terms of f(u0 + X, v0 + Y) where f is ``F_poly`` dehomogenized at ``chart``."""
    field = F_poly.field
    others = [i for i in range(3) if i != chart]
    images = [None, None, None]
    images[chart] = MultiPoly.constant(field, 2, 1)
    images[others[0]] = MultiPoly(field, 2, {(0, 0): pt[others[0]], (1, 0): 1})
    images[others[1]] = MultiPoly(field, 2, {(0, 0): pt[others[1]], (0, 1): 1})
    return F_poly.substitute_linear(images).terms


def _chart_of(pt) -> int:
    return next(i for i, x in enumerate(pt) if x != 0)


def _local_branches(F_poly: MultiPoly, pt, expected_m=None):
    """Build all branch parametrizations at a rational point.

    Returns (multiplicity, list of branches).  Raises SingularityMismatch if
    the point is not ordinary or a tangent direction is not rational.
    """
    field = F_poly.field
    chart = _chart_of(pt)
    others = [i for i in range(3) if i != chart]
    T = _translated_affine(F_poly, chart, pt)
    if not T:
        raise SingularityMismatch("form vanishes identically")
    m = min(i + j for (i, j) in T)
    if m == 0:
        raise SingularityMismatch(f"point {pt} is not on the curve")
    if expected_m is not None and m != expected_m:
        raise SingularityMismatch(f"point {pt} has multiplicity {m}, declared {expected_m}")
    cone = {(i, j): c for (i, j), c in T.items() if i + j == m}
    # slopes Y/X: roots of cone(1, s)
    cone_s = [field.zero] * (m + 1)
    for (i, j), c in cone.items():
        cone_s[j] = c
    cone_s = upoly.trim(cone_s)
    vertical_mult = m - upoly.deg(cone_s)
    rts = upoly.roots(field, cone_s)
    if any(k > 1 for k in rts.values()) or vertical_mult > 1:
        raise SingularityMismatch(f"point {pt} is not ordinary (repeated tangent)")
    if sum(rts.values()) + vertical_mult != m:
        raise SingularityMismatch(f"point {pt} has tangent directions outside the ground field")
    u0, v0 = pt[others[0]], pt[others[1]]
    branches = []
    dcone = upoly.derivative(field, cone_s)
    g_nv = {}
    for (i, j), c in T.items():
        key = (i + j - m, j)
        g_nv[key] = field.add(g_nv.get(key, field.zero), c)
    for a in sorted(rts):
        gs0 = upoly.evaluate(field, dcone, a)
        branches.append(_LocalBranch(field, chart, u0, v0, m, g_nv, a, gs0, False))
    if vertical_mult:
        g_v = {}
        for (i, j), c in T.items():
            key = (i + j - m, i)
            g_v[key] = field.add(g_v.get(key, field.zero), c)
        gs0 = cone.get((1, m - 1), field.zero)
        branches.append(_LocalBranch(field, chart, u0, v0, m, g_v, field.zero, gs0, True))
    return m, branches


@dataclass
class LineData:
    form: tuple
    places: Divisor
    residual: list
    squarefree: bool
    base: tuple
    direction: tuple

    @property
    def split(self) -> bool:
        return upoly.deg(self.residual) <= 0


@dataclass(frozen=True)
class RationalFn:
    """Quotient of two forms of equal degree, viewed as a function on the curve."""

    num: MultiPoly
    den: MultiPoly

    def value(self, point):
        F = self.num.field
        d = self.den.eval_raw(point)
        if d == 0:
            raise ZeroDivisionError("denominator vanishes at point")
        return F.div(self.num.eval_raw(point), d)

    def __mul__(self, other: "RationalFn") -> "RationalFn":
        return RationalFn(self.num * other.num, self.den * other.den)

    def inverse(self) -> "RationalFn":
        return RationalFn(self.den, self.num)


@dataclass
class LinearSeries:
    """Basis of L(D) = {f : div(f) + D >= 0} as numerators over one denominator."""

    divisor: Divisor
    den: MultiPoly | None
    numerators: list = dc_field(default_factory=list)

    @property
    def dim(self) -> int:
        return len(self.numerators)

    @property
    def basis(self) -> list:
        return [RationalFn(g, self.den) for g in self.numerators]

    def values(self, point) -> list:
        d = self.den.eval_raw(point)
        F = self.den.field
        if d == 0:
            raise ZeroDivisionError("denominator vanishes at point")
        inv = F.inv(d)
        return [F.mul(inv, g.eval_raw(point)) for g in self.numerators]


class PlaneCurve:
    """Plane model with ordinary singularities over Q or F_p."""

    def __init__(self, field, F: MultiPoly, singular_points=(), rational_points=None, name=""):
        if F.nvars != 3 or not F.is_homogeneous() or F.is_zero():
            raise CurveError("curve equation must be a nonzero ternary form")
        if F.field != field:
            raise CurveError("equation field differs from declared field")
        self.field = field
        self.F = F
        self.name = name
        self.degree = F.degree()
        self.grad = [F.partial(i) for i in range(3)]
        self._branches: dict = {}
        sing = []
        for pt, m in singular_points:
            pt = normalize_point(field, pt)
            mult, br = _local_branches(F, pt, expected_m=m)
            sing.append((pt, mult))
            for k, b in enumerate(br):
                self._branches[Place(pt, k)] = b
        self.singular_points = sorted(sing)
        self._singular_set = {pt for pt, _ in sing}
        d = self.degree
        self.genus = (d - 1) * (d - 2) // 2 - sum(m * (m - 1) // 2 for _, m in sing)
        self._points = None
        if rational_points is not None:
            pts = []
            for pt in rational_points:
                pt = normalize_point(field, pt)
                self._check_smooth(pt)
                pts.append(pt)
            self._points = sorted(set(pts))
        self._rows_cache: dict = {}
        self._line_cache: dict = {}
        self._lines_through: dict = {}
        self._rr_cache: dict = {}
        self._A0 = None

    def __repr__(self):
        return f"PlaneCurve({self.name or 'unnamed'}, d={self.degree}, g={self.genus}, {self.field!r})"

    # -- points -------------------------------------------------------------

    def is_singular(self, pt) -> bool:
        return pt in self._singular_set

    def _check_smooth(self, pt):
        if self.F.eval_raw(pt) != 0:
            raise CurveError(f"point {pt} is not on the curve")
        if pt in self._singular_set:
            raise SmoothPointOnSingularity(f"point {pt} is a declared singular point")
        if all(g.eval_raw(pt) == 0 for g in self.grad):
            raise SmoothPointOnSingularity(f"point {pt} is singular but undeclared")

    def multiplicity(self, pt) -> int:
        for q, m in self.singular_points:
            if q == pt:
                return m
        return 1

    def branch_places(self, pt) -> list:
        m = self.multiplicity(pt)
        return [Place(pt, k) for k in range(m)]

    @property
    def rational_points(self) -> list:
        if self._points is None:
            self._points = point_scan(self)
        return self._points

    def place(self, pt, branch: int = 0) -> Place:
        pt = normalize_point(self.field, pt)
        P = Place(pt, branch)
        self._branch(P)
        return P

    def _branch(self, P: Place) -> _LocalBranch:
        b = self._branches.get(P)
        if b is None:
            if P.point in self._singular_set or P.branch != 0:
                raise CurveError(f"no place {P!r}")
            self._check_smooth(P.point)
            _, br = _local_branches(self.F, P.point, expected_m=1)
            b = br[0]
            self._branches[P] = b
        return b

    def conductor(self) -> Divisor:
        return Divisor([(Place(pt, k), m - 1) for pt, m in self.singular_points for k in range(m)])

    def local_parameter_index(self, P: Place) -> int:
        b = self._branch(P)
        others = [i for i in range(3) if i != b.chart]
        return others[1] if b.vertical else others[0]

    # -- local expansions ---------------------------------------------------

    def monomial_rows(self, P: Place, n: int, k: int):
        """k x #monomials matrix: series coefficients of each degree-n monomial at P."""
        key = (P, n, k)
        hit = self._rows_cache.get(key)
        if hit is not None:
            return hit
        F = self.field
        mons = homogeneous_monomials(3, n)
        if k == 0:
            rows = []
        else:
            coords = self._branch(P).coords(k)
            pw = []
            for c in range(3):
                lst = [[F.one] + [F.zero] * (k - 1)]
                for _ in range(n):
                    lst.append(_ser_mul(F, lst[-1], coords[c], k))
                pw.append(lst)
            cols = []
            for e in mons:
                s = _ser_mul(F, pw[0][e[0]], pw[1][e[1]], k)
                cols.append(_ser_mul(F, s, pw[2][e[2]], k))
            rows = [[col[i] for col in cols] for i in range(k)]
        self._rows_cache[key] = rows
        return rows

    def form_series(self, G: MultiPoly, P: Place, k: int) -> list:
        F = self.field
        n = G.degree()
        if n < 0:
            return [F.zero] * k
        rows = self.monomial_rows(P, n, k)
        vec = G.to_vector(homogeneous_monomials(3, n))
        if F.kind == "prime":
            return [sum(a * b for a, b in zip(r, vec)) % F.p for r in rows]
        return [sum((a * b for a, b in zip(r, vec)), Fraction(0)) for r in rows]

    def order_at(self, G: MultiPoly, P: Place, cap: int = 64) -> int:
        k = 4
        while k <= cap:
            s = self.form_series(G, P, k)
            for i, x in enumerate(s):
                if x != 0:
                    return i
            k *= 2
        raise CurveError("form vanishes to very high order (identically zero on the curve?)")

    # -- lines --------------------------------------------------------------

    def line(self, form) -> LineData:
        form = normalize_point(self.field, form)
        hit = self._line_cache.get(form)
        if hit is not None:
            return hit
        F = self.field
        kernel = mat_nullspace(Matrix._raw(F, [list(form)], 3)).columns()
        A, B = kernel[0], kernel[1]
        lin = [[B[k], A[k]] for k in range(3)]
        phi = _restrict(F, self.F, lin)
        at_inf = self.degree - upoly.deg(phi)
        rts = upoly.roots(F, phi)
        meets = {}
        for lam, k in rts.items():
            pt = normalize_point(F, [F.add(F.mul(lam, a), b) for a, b in zip(A, B)])
            meets[pt] = k
        if at_inf > 0:
            meets[normalize_point(F, A)] = at_inf
        residual = upoly.monic(F, upoly.strip_roots(F, phi, rts))
        lform = MultiPoly(F, 3, {(1, 0, 0): form[0], (0, 1, 0): form[1], (0, 0, 1): form[2]})
        terms = []
        for pt, k in meets.items():
            if pt in self._singular_set:
                for P in self.branch_places(pt):
                    terms.append((P, self.order_at(lform, P)))
            else:
                self._check_smooth(pt)
                terms.append((Place(pt, 0), k))
        places = Divisor(terms)
        if places.degree + upoly.deg(residual) != self.degree:
            raise CurveError("intersection count mismatch on line")
        data = LineData(form, places, residual, upoly.is_squarefree(F, residual), tuple(B), tuple(A))
        self._line_cache[form] = data
        return data

    def line_form(self, data: LineData) -> MultiPoly:
        a = data.form
        return MultiPoly(self.field, 3, {(1, 0, 0): a[0], (0, 1, 0): a[1], (0, 0, 1): a[2]})

    def line_through(self, P, Q) -> LineData:
        return self.line(_cross(self.field, P, Q))

    def residual_rows(self, data: LineData, n: int):
        """Rows expressing 'form restricted to the line is divisible by the residual'."""
        F = self.field
        r = data.residual
        dr = upoly.deg(r)
        if dr <= 0:
            return []
        lin = [[b, a] for a, b in zip(data.direction, data.base)]
        pw = []
        for c in range(3):
            lst = [[F.one]]
            for _ in range(n):
                lst.append(upoly.rem(F, upoly.mul(F, lst[-1], lin[c]), r))
            pw.append(lst)
        cols = []
        for e in homogeneous_monomials(3, n):
            s = upoly.rem(F, upoly.mul(F, upoly.mul(F, pw[0][e[0]], pw[1][e[1]]), pw[2][e[2]]), r)
            cols.append(s + [F.zero] * (dr - len(s)))
        return [[col[i] for col in cols] for i in range(dr)]

    def _auxiliary_lines(self, P: Place, count: int) -> list:
        """``count`` distinct lines through the point of P with squarefree residuals."""
        have = self._lines_through.setdefault(P.point, [])
        if len(have) >= count:
            return have[:count]
        pts = self.rational_points
        # deterministic start offset so different points use different partners
        start = (sum(int(x) if not isinstance(x, Fraction) else x.numerator for x in P.point) * 7919) % max(1, len(pts))
        seen = {L.form for L in have}
        for i in range(len(pts)):
            Q = pts[(start + i) % len(pts)]
            if Q == P.point:
                continue
            L = self.line_through(P.point, Q)
            if L.form in seen or not L.squarefree:
                continue
            seen.add(L.form)
            have.append(L)
            if len(have) >= count:
                return have[:count]
        raise SearchFailure(f"could not find {count} auxiliary lines through {P!r}")

    # -- canonical reference adjoint ----------------------------------------

    def reference_adjoint(self) -> list:
        """Split lines whose product is an adjoint of degree d-3 (cached)."""
        if self._A0 is None:
            self._A0 = _find_reference_adjoint(self)
        return self._A0

    def reference_adjoint_form(self) -> MultiPoly:
        out = MultiPoly.constant(self.field, 3)
        for L in self.reference_adjoint():
            out = out * self.line_form(L)
        return out

    def canonical_divisor(self) -> Divisor:
        div = Divisor()
        for L in self.reference_adjoint():
            div = div + L.places
        return div - self.conductor()

    # -- Riemann-Roch -------------------------------------------------------

    def check_divisor(self, D: Divisor):
        for P in D.support():
            self._branch(P)

    def rr_space(self, D: Divisor) -> LinearSeries:
        hit = self._rr_cache.get(D)
        if hit is not None:
            return hit
        res = self._rr_space(D)
        self._rr_cache[D] = res
        return res

    def _rr_space(self, D: Divisor) -> LinearSeries:
        F = self.field
        self.check_divisor(D)
        if D.degree < 0:
            return LinearSeries(D, MultiPoly.constant(F, 3), [])
        A0 = self.reference_adjoint()
        divA0 = Divisor()
        for L in A0:
            divA0 = divA0 + L.places
        E = self.conductor()
        Dplus = D.positive()
        d = self.degree
        best = None
        for a in (1, 2, 3):
            extra = (Dplus - (divA0 * a - E)).positive()
            cost = a * (d - 3) + extra.degree
            if best is None or cost < best[0]:
                best = (cost, a, extra)
        n, a, extra = best
        lines = []
        for P, k in extra.items():
            lines.extend(self._auxiliary_lines(P, k))
        divH = divA0 * a
        H = MultiPoly.constant(F, 3)
        for L in A0:
            H = H * self.line_form(L) ** a
        for L in lines:
            divH = divH + L.places
            H = H * self.line_form(L)
        target = divH - D
        mons = homogeneous_monomials(3, n)
        rows = []
        for P, k in target.positive().items():
            rows.extend(self.monomial_rows(P, n, k))
        for L in lines:
            rows.extend(self.residual_rows(L, n))
        if rows:
            sol = mat_nullspace(Matrix._raw(F, rows, len(mons))).columns()
        else:
            sol = [tuple(F.one if i == j else F.zero for i in range(len(mons))) for j in range(len(mons))]
        if n >= d and sol:
            fmult = [(self.F * MultiPoly.from_vector(F, homogeneous_monomials(3, n - d), [F.one if i == j else F.zero for i in range(len(homogeneous_monomials(3, n - d)))])).to_vector(mons)
                     for j in range(len(homogeneous_monomials(3, n - d)))]
            keep = independent_rows(F, fmult + [list(s) for s in sol], len(mons))
            sol = [sol[i - len(fmult)] for i in keep if i >= len(fmult)]
        nums = [MultiPoly.from_vector(F, mons, s) for s in sol]
        return LinearSeries(D, H, nums)

    def canonical_series(self) -> LinearSeries:
        return self.rr_space(self.canonical_divisor())

    def h0(self, D: Divisor) -> int:
        return self.rr_space(D).dim

    def lin_equiv(self, D1: Divisor, D2: Divisor):
        """f with div(f) = D2 - D1 if the divisors are linearly equivalent, else None."""
        if D1.degree != D2.degree:
            raise CurveError("degree mismatch in linear equivalence test")
        L = self.rr_space(D1 - D2)
        if L.dim == 0:
            return None
        if L.dim != 1:
            raise CurveError("degree-zero divisor with h0 > 1")
        return L.basis[0]

    # -- evaluation helpers -------------------------------------------------

    def sample_points(self, count: int, avoid: Iterable = (), dens: Sequence[MultiPoly] = (), offset: int = 0) -> list:
        """Rational smooth points outside ``avoid`` where all ``dens`` are nonzero."""
        bad = {P.point if isinstance(P, Place) else P for P in avoid}
        pts = self.rational_points
        out = []
        n = len(pts)
        for i in range(n):
            pt = pts[(offset + i) % n]
            if pt in bad:
                continue
            if any(h.eval_raw(pt) == 0 for h in dens):
                continue
            out.append(pt)
            if len(out) == count:
                return out
        raise BudgetExhausted(f"only {len(out)} usable sample points, wanted {count}")

    def product_into(self, L1: LinearSeries, L2: LinearSeries, target: LinearSeries):
        """Tensor T with f_i g_j = sum_k T[i][j][k] h_k, solved by evaluation."""
        F = self.field
        if target.dim == 0:
            if L1.dim and L2.dim:
                raise ProductNotExpressible("target space is zero")
            return [[[] for _ in range(L2.dim)] for _ in range(L1.dim)]
        # a nonzero element of L(T) has at most deg T zeros off its support
        need = max(target.divisor.degree + 1, target.dim + 1)
        avoid = L1.divisor.support() + L2.divisor.support() + target.divisor.support()
        pts = self.sample_points(need, avoid, [L1.den, L2.den, target.den])
        V = [target.values(p) for p in pts]
        a = [L1.values(p) for p in pts]
        b = [L2.values(p) for p in pts]
        pairs = [(i, j) for i in range(L1.dim) for j in range(L2.dim)]
        W = [[F.mul(a[r][i], b[r][j]) for (i, j) in pairs] for r in range(len(pts))]
        coeffs = solve_columns(F, V, W, target.dim)
        if coeffs is None:
            raise ProductNotExpressible("a product is not in the target space")
        T = [[None] * L2.dim for _ in range(L1.dim)]
        for c, (i, j) in enumerate(pairs):
            T[i][j] = [coeffs[k][c] for k in range(target.dim)]
        return T

    def laurent(self, f: RationalFn, P: Place, start: int, count: int) -> list:
        """Coefficients of t**start .. t**(start+count-1) in the expansion of f at P."""
        F = self.field
        od = self.order_at(f.den, P)
        k = od + start + count
        if k <= 0:
            return [F.zero] * count
        ns = self.form_series(f.num, P, k)
        ds = self.form_series(f.den, P, od + k)[od:]
        inv = F.inv(ds[0])
        q = []
        for i in range(k):
            acc = ns[i]
            for j in range(1, i + 1):
                acc = F.sub(acc, F.mul(ds[j], q[i - j]))
            q.append(F.mul(acc, inv))
        lo = od + start
        return [q[i] if i >= 0 else F.zero for i in range(lo, lo + count)]

    def eval_functional(self, L: LinearSeries, P: Place) -> list:
        """Leading coefficient at P of each basis element in the trivialization of O(D)."""
        start = -L.divisor[P]
        out = []
        for g in L.numerators:
            out.append(self.laurent(RationalFn(g, L.den), P, start, 1)[0])
        return out

    def eval_jet(self, f: RationalFn, P, order: int = 2) -> list:
        """Taylor coefficients of f at P in the canonical local parameter."""
        if not isinstance(P, Place):
            P = self.place(P)
        if order > 2:
            raise ValueError("jets are supported up to order 2")
        if not f.num.is_zero() and self.order_at(f.num, P) < self.order_at(f.den, P):
            raise CurveError("function has a pole at the point")
        return self.laurent(f, P, 0, order + 1)

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        F = self.field
        coeffs = [[*e, _scalar_json(F, c)] for e, c in sorted(self.F.terms.items(), reverse=True)]
        out = {
            "field": F.to_json(),
            "degree": self.degree,
            "coefficients": coeffs,
            "singular_points": [
                {"point": [_scalar_json(F, x) for x in pt], "multiplicity": m} for pt, m in self.singular_points
            ],
        }
        if self.name:
            out["name"] = self.name
        if self._points is not None:
            out["rational_points"] = [[_scalar_json(F, x) for x in pt] for pt in self._points]
        return out


def _scalar_json(F, x):
    if F.kind == "prime":
        return int(x)
    x = Fraction(x)
    return int(x) if x.denominator == 1 else str(x)


def _cross(F, P, Q):
    return (
        F.sub(F.mul(P[1], Q[2]), F.mul(P[2], Q[1])),
        F.sub(F.mul(P[2], Q[0]), F.mul(P[0], Q[2])),
        F.sub(F.mul(P[0], Q[1]), F.mul(P[1], Q[0])),
    )


def _restrict(F, poly: MultiPoly, lin) -> list:
    """Univariate polynomial poly(lin_0(t), lin_1(t), lin_2(t)) for linear lin_i."""
    d = poly.degree()
    pw = []
    for c in range(3):
        lst = [[F.one]]
        for _ in range(d):
            lst.append(upoly.mul(F, lst[-1], lin[c]))
        pw.append(lst)
    out = []
    for e, c in poly.terms.items():
        term = upoly.mul(F, upoly.mul(F, pw[0][e[0]], pw[1][e[1]]), pw[2][e[2]])
        out = upoly.add(F, out, [F.mul(c, x) for x in term])
    return out


def solve_columns(F, V, W, nunk):
    """Solve V X = W exactly (columns of W are right-hand sides); None if inconsistent."""
    nrhs = len(W[0]) if W else 0
    aug = Matrix._raw(F, [list(v) + list(w) for v, w in zip(V, W)], nunk + nrhs)
    red, piv = echelon(aug)
    if any(p >= nunk for p in piv):
        return None
    if len(piv) < nunk:
        raise CurveError("evaluation matrix is not injective")
    X = [[F.zero] * nrhs for _ in range(nunk)]
    for row, pc in zip(red, piv):
        X[pc] = list(row[nunk:])
    return X


def _find_reference_adjoint(C: PlaneCurve) -> list:
    """Cover each m-fold point by m-1 split lines using d-3 lines in total."""
    F = C.field
    d = C.degree
    budget = d - 3
    if budget < 0:
        raise CurveError("curves of degree < 3 are not supported")
    demand = {pt: m - 1 for pt, m in C.singular_points if m > 1}
    pts = C.rational_points

    def ok(L, cover):
        # branch orders exactly 1 at covered points, no other singular points touched
        for P, k in L.places.items():
            if P.point in C._singular_set:
                if P.point not in cover or k != 1:
                    return False
        return L.split

    def solve(dem, left, used):
        todo = [p for p in sorted(dem) if dem[p] > 0]
        if not todo:
            return []
        if left == 0:
            return None
        a = todo[0]
        options = []
        for b in todo[1:]:
            L = C.line_through(a, b)
            if L.form not in used and ok(L, {a, b}):
                options.append((L, (a, b)))
        count = 0
        for Q in pts:
            if count >= 8:
                break
            L = C.line_through(a, Q)
            if L.form in used or not ok(L, {a}):
                continue
            options.append((L, (a,)))
            count += 1
        for L, cov in options:
            nd = dict(dem)
            for c in cov:
                nd[c] -= 1
            rest = solve(nd, left - 1, used | {L.form})
            if rest is not None:
                return [L] + rest
        return None

    lines = solve(demand, budget, frozenset())
    if lines is None:
        raise SearchFailure("no split-line adjoint of degree d-3 covers the singular points")
    used = {L.form for L in lines}
    i = 0
    for P, Q in combinations(pts, 2):
        if len(lines) == budget:
            break
        L = C.line_through(P, Q)
        if L.form in used or not ok(L, set()):
            continue
        # keep K0 reduced where possible: avoid tangencies to earlier lines' points
        used.add(L.form)
        lines.append(L)
        i += 1
    if len(lines) != budget:
        raise SearchFailure("not enough split lines for the reference adjoint")
    return lines


# ---------------------------------------------------------------------------
# point enumeration


def point_scan(C: PlaneCurve, count: int | None = None) -> list:
    """Smooth rational points, deterministic order (x-sweep over prime fields)."""
    F = C.field
    if F.kind != "prime":
        pts = C._points or []
        if count is not None and len(pts) < count:
            raise BudgetExhausted(f"only {len(pts)} rational points supplied, wanted {count}")
        return list(pts)
    p = F.p
    found = []
    # chart x0 = 1: F(1, a, Y) as a polynomial in Y with coefficients in a
    by_y: dict = {}
    for (e0, e1, e2), c in C.F.terms.items():
        by_y.setdefault(e2, {}).setdefault(e1, 0)
        by_y[e2][e1] = (by_y[e2][e1] + c) % p
    dy = max(by_y)
    for a in range(p):
        coeffs = [sum(c * pow(a, k, p) for k, c in by_y.get(j, {}).items()) % p for j in range(dy + 1)]
        coeffs = upoly.trim(coeffs)
        if not coeffs:
            raise CurveError("curve contains a whole line")
        for y in sorted(upoly.roots(F, coeffs)):
            found.append((1, a, y))
    line_inf = upoly.trim([C.F.terms.get((0, C.degree - j, j), 0) for j in range(C.degree + 1)])
    if not line_inf:
        raise CurveError("curve contains the line x0 = 0")
    for y in sorted(upoly.roots(F, line_inf)):
        found.append((0, 1, y))
    if C.F.terms.get((0, 0, C.degree), 0) == 0:
        found.append((0, 0, 1))
    out = []
    for pt in found:
        if pt in C._singular_set:
            continue
        C._check_smooth(pt)
        out.append(pt)
    if count is not None:
        if len(out) < count:
            raise BudgetExhausted(f"only {len(out)} rational points, wanted {count}")
    return out


# ---------------------------------------------------------------------------
# JSON


def curve_load(desc) -> PlaneCurve:
    """Build a curve from a dict or a path to a JSON curve description."""
    if isinstance(desc, (str, bytes)) or hasattr(desc, "__fspath__"):
        with open(desc) as fh:
            desc = json.load(fh)
    unknown = set(desc) - {"field", "degree", "coefficients", "singular_points", "rational_points", "name", "notes", "cliff"}
    if unknown:
        raise CurveError(f"unknown keys in curve description: {sorted(unknown)}")
    F = field_from_json(desc["field"])
    terms = {}
    for row in desc["coefficients"]:
        if len(row) != 4:
            raise CurveError(f"coefficient row {row!r} must be [e0, e1, e2, c]")
        e = tuple(int(x) for x in row[:3])
        terms[e] = F.add(terms.get(e, F.zero), F(row[3]))
    poly = MultiPoly(F, 3, terms)
    if poly.degree() != int(desc["degree"]) or not poly.is_homogeneous():
        raise CurveError("coefficients are not homogeneous of the declared degree")
    sing = [(sp["point"], int(sp["multiplicity"])) for sp in desc.get("singular_points", [])]
    return PlaneCurve(F, poly, sing, desc.get("rational_points"), desc.get("name", ""))


def curve_dump(C: PlaneCurve, path=None) -> str:
    text = json.dumps(C.to_json(), indent=1, sort_keys=True)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    return text
