"""Extension classes of K-D by D and the rank stratification of their spaces.

An extension class is stored dually: a divisor ``D`` and a linear functional
``e`` on the basis of L(2K-2D).  Every quantity used here factors through the
bilinear form ``(s, t) -> e(s*t)`` on L(K-D):

* its rank ``n`` is the stratum index;
* ``h0(E) = h0(D) + h0(K-D) - n``;
* the classes with ``n = 0`` form the kernel space ``omega0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement

import numpy as np

from .curves import CurveError, Divisor, LinearSeries, Place, PlaneCurve, RationalFn
from .exact import Matrix, mat_nullspace, mat_rank


class BasePointError(CurveError):
    pass


class ExtensionSpace:
    """Cached Riemann-Roch data for extensions 0 -> O(D) -> E -> O(K-D) -> 0."""

    def __init__(self, C: PlaneCurve, D: Divisor):
        self.C = C
        self.D = D
        self.K = C.canonical_divisor()
        self.LD = C.rr_space(D)
        self.LKD = C.rr_space(self.K - D)
        self.L2 = C.rr_space(self.K * 2 - D * 2)
        self._mult = None
        self._omega0 = None

    @property
    def dim(self) -> int:
        return self.L2.dim

    @property
    def mult(self):
        """T[i][j] = coordinates of s_i * s_j in the basis of L(2K-2D)."""
        if self._mult is None:
            self._mult = self.C.product_into(self.LKD, self.LKD, self.L2)
        return self._mult

    def form(self, e) -> Matrix:
        F = self.C.field
        T = self.mult
        h = self.LKD.dim
        rows = [[_pair(F, T[i][j], e) for j in range(h)] for i in range(h)]
        return Matrix._raw(F, rows, h)

    def omega0(self) -> list:
        if self._omega0 is None:
            F = self.C.field
            h = self.LKD.dim
            rows = [list(self.mult[i][j]) for i in range(h) for j in range(i, h)]
            if rows and self.dim:
                self._omega0 = [list(c) for c in mat_nullspace(Matrix._raw(F, rows, self.dim)).columns()]
            else:
                self._omega0 = [[F.one if i == k else F.zero for i in range(self.dim)] for k in range(self.dim)]
        return self._omega0

    def eval_functional(self, P: Place) -> list:
        return self.C.eval_functional(self.L2, P)


def _pair(F, vec, e):
    if F.kind == "prime":
        return sum(a * b for a, b in zip(vec, e)) % F.p
    return sum(a * b for a, b in zip(vec, e))


def extension_space(C: PlaneCurve, D: Divisor) -> ExtensionSpace:
    cache = C.__dict__.setdefault("_ext_cache", {})
    hit = cache.get(D)
    if hit is None:
        hit = cache[D] = ExtensionSpace(C, D)
    return hit


@dataclass(frozen=True)
class ExtensionClass:
    D: Divisor
    e: tuple

    def scaled(self, F, lam):
        return ExtensionClass(self.D, tuple(F.mul(F(lam), x) for x in self.e))


@dataclass
class StratumReport:
    genus: int
    deg_D: int
    h0_D: int
    h0_KD: int
    rank: int
    h0_E: int = field(init=False)
    cliff_D: int = field(init=False)
    h0_E_clifford: int = field(init=False)

    def __post_init__(self):
        self.h0_E = self.h0_D + self.h0_KD - self.rank
        self.cliff_D = self.deg_D - 2 * (self.h0_D - 1)
        self.h0_E_clifford = self.genus + 1 - self.cliff_D - self.rank

    @property
    def identities_hold(self) -> bool:
        return self.h0_E == self.h0_E_clifford

    def as_dict(self) -> dict:
        return {
            "deg_D": self.deg_D,
            "h0_D": self.h0_D,
            "h0_K_minus_D": self.h0_KD,
            "rank": self.rank,
            "cliff_D": self.cliff_D,
            "h0_E": self.h0_E,
            "h0_E_from_clifford": self.h0_E_clifford,
        }


def make_class(C: PlaneCurve, D: Divisor, e) -> ExtensionClass:
    X = extension_space(C, D)
    F = C.field
    e = tuple(F(x) for x in e)
    if len(e) != X.dim:
        raise CurveError(f"functional has length {len(e)}, extension space has dimension {X.dim}")
    if all(x == 0 for x in e):
        raise CurveError("zero functional is not an extension class")
    return ExtensionClass(D, e)


def ext_dim(C: PlaneCurve, D: Divisor) -> int:
    if not 0 <= D.degree <= C.genus - 1:
        raise CurveError("extension spaces need 0 <= deg D <= g-1")
    return extension_space(C, D).dim


def delta_form(C: PlaneCurve, D: Divisor, e) -> Matrix:
    return extension_space(C, D).form(e)


def stratum_index(C: PlaneCurve, D: Divisor, e) -> int:
    return mat_rank(delta_form(C, D, e))


def h0_ext(C: PlaneCurve, D: Divisor, e) -> StratumReport:
    X = extension_space(C, D)
    return StratumReport(C.genus, D.degree, X.LD.dim, X.LKD.dim, mat_rank(X.form(e)))


def omega0(C: PlaneCurve, D: Divisor) -> list:
    return extension_space(C, D).omega0()


def eval_class(C: PlaneCurve, D: Divisor, P: Place) -> list:
    """The functional 'leading value at P' on L(2K-2D): the image of P in P(Ext)."""
    return extension_space(C, D).eval_functional(P)


def twist_h0(C: PlaneCurve, D: Divisor, Dp: Divisor, e) -> int:
    """h0(E(-D')) = h0(D-D') + h0(K-D-D') - rank of (s, t) -> e(s t)."""
    X = extension_space(C, D)
    F = C.field
    K = X.K
    A = C.rr_space(D - Dp)
    S = C.rr_space(K - D - Dp)
    T = C.rr_space(K - D + Dp)
    if S.dim == 0 or T.dim == 0:
        return A.dim + S.dim
    tensor = C.product_into(S, T, X.L2)
    P = Matrix._raw(F, [[_pair(F, tensor[i][j], e) for j in range(T.dim)] for i in range(S.dim)], T.dim)
    return A.dim + S.dim - mat_rank(P)


def base_points(C: PlaneCurve, Dp: Divisor) -> list:
    """Base points of |D'| among cached points, support points and singular branches."""
    cache = C.__dict__.setdefault("_bp_cache", {})
    if Dp in cache:
        return cache[Dp]
    L = C.rr_space(Dp)
    out = []
    if L.dim == 0:
        raise BasePointError("empty linear system")
    supp = set(Dp.support())
    for pt in C.rational_points:
        P = Place(pt)
        if P in supp:
            continue
        if L.den.eval_raw(pt) != 0:
            if all(v == 0 for v in L.values(pt)):
                out.append(P)
            continue
        supp.add(P)
    for pt, _ in C.singular_points:
        supp.update(C.branch_places(pt))
    for P in sorted(supp):
        vals = C.eval_functional(L, P)
        if all(v == 0 for v in vals):
            out.append(P)
    cache[Dp] = sorted(out)
    return cache[Dp]


def mukai_check(C: PlaneCurve, D: Divisor, Dp: Divisor, e) -> bool:
    if Dp.degree and base_points(C, Dp):
        raise BasePointError("|D'| has base points")
    return twist_h0(C, D, Dp, e) >= h0_ext(C, D, e).h0_E - Dp.degree


def span_membership(C: PlaneCurve, D_span: Divisor, ext: ExtensionClass) -> bool:
    """True iff e kills every s in L(2K-2D) with div(s) >= D_span (plus the pole bound)."""
    X = extension_space(C, ext.D)
    sub = C.rr_space(X.L2.divisor - D_span)
    if sub.dim == 0:
        return True
    coords = inclusion(C, sub, X.L2)
    F = C.field
    return all(_pair(F, row, ext.e) == 0 for row in coords)


def inclusion(C: PlaneCurve, sub: LinearSeries, sup: LinearSeries) -> list:
    """Coordinates of the basis of ``sub`` in the basis of ``sup``."""
    one = C.rr_space(Divisor())
    T = C.product_into(one, sub, sup)
    return [T[0][j] for j in range(sub.dim)]


def maximal_subbundle_scan(C: PlaneCurve, ext: ExtensionClass, target_deg: int, pool, budget: int = 20000) -> list:
    """All multisets of pool points of size target_deg whose span contains the class."""
    if target_deg == 0:
        return []
    combos = list(combinations_with_replacement(range(len(pool)), target_deg))
    if len(combos) > budget:
        raise CurveError(f"{len(combos)} combinations exceed the budget {budget}")
    out = []
    for c in combos:
        Dspan = Divisor([(Place(pool[i]) if not isinstance(pool[i], Place) else pool[i], 1) for i in c])
        if span_membership(C, Dspan, ext):
            out.append(Dspan)
    return out


@dataclass(frozen=True)
class Incidence:
    kind: str  # Secant | Point | Empty | Indeterminate
    p: Place | None = None
    q: Place | None = None


def effective_representative(C: PlaneCurve, L: LinearSeries, f: RationalFn):
    """div(f) + D for f in L(D), if it is supported on rational places (else None)."""
    D = L.divisor
    target = D.degree
    F = C.field
    found = []
    seen = set()
    for P in D.support():
        seen.add(P)
        k = C.order_at(f.num, P) - C.order_at(f.den, P) + D[P]
        if k > 0:
            found.append((P, k))
    for pt, _ in C.singular_points:
        for P in C.branch_places(pt):
            if P in seen:
                continue
            seen.add(P)
            k = C.order_at(f.num, P) - C.order_at(f.den, P)
            if k > 0:
                found.append((P, k))
    for pt in C.rational_points:
        P = Place(pt)
        if P in seen:
            continue
        if f.den.eval_raw(pt) != 0 and f.num.eval_raw(pt) != 0:
            continue
        k = C.order_at(f.num, P) - C.order_at(f.den, P)
        if k > 0:
            found.append((P, k))
    rep = Divisor(found)
    return rep if rep.degree == target else None


def incidence_case(C: PlaneCurve, x: Divisor, y: Divisor, pool) -> Incidence:
    g = C.genus
    if x.degree != g - 2 or y.degree != g - 2:
        raise CurveError("incidence needs two divisors of degree g-2")
    K = C.canonical_divisor()
    L = C.rr_space(K - x - y)
    if L.dim >= 1:
        rep = effective_representative(C, L, L.basis[0])
        if rep is None:
            return Incidence("Indeterminate")
        places = [P for P, k in rep.items() for _ in range(k)]
        return Incidence("Secant", places[0], places[1])
    places = [P if isinstance(P, Place) else Place(P) for P in pool]
    for p in places:
        for q in places:
            if p != q and C.lin_equiv(x + Divisor([(p, 1)]), y + Divisor([(q, 1)])) is not None:
                return Incidence("Point", p, q)
    return Incidence("Empty")


# ---------------------------------------------------------------------------
# sampling scans


def random_effective(C: PlaneCurve, degree: int, rng, pool=None) -> Divisor:
    pts = pool if pool is not None else C.rational_points
    idx = rng.choice(len(pts), size=degree, replace=False) if degree else []
    return Divisor([(Place(pts[int(i)]), 1) for i in idx])


def random_functional(C: PlaneCurve, dim: int, rng) -> list:
    F = C.field
    while True:
        e = [F.random(rng) for _ in range(dim)]
        if any(x != 0 for x in e):
            return e


def random_in_span(C: PlaneCurve, vectors, rng) -> list:
    F = C.field
    while True:
        lam = [F.random(rng) for _ in vectors]
        e = [F.zero] * len(vectors[0])
        for c, v in zip(lam, vectors):
            e = [F.add(a, F.mul(c, b)) for a, b in zip(e, v)]
        if any(x != 0 for x in e):
            return e


def structured_functionals(C: PlaneCurve, D: Divisor, rng, k_max: int = 3) -> list:
    """Kernel vectors and sums of point evaluations: the measure-zero strata."""
    X = extension_space(C, D)
    out = []
    if X.omega0():
        out.append(("omega0", random_in_span(C, X.omega0(), rng)))
    supp = {P.point for P in X.L2.divisor.support()}
    pts = [pt for pt in C.rational_points if pt not in supp]
    F = C.field
    k = int(rng.integers(1, k_max + 1))
    chosen = [pts[int(i)] for i in rng.choice(len(pts), size=k, replace=False)]
    e = [F.zero] * X.dim
    for pt in chosen:
        v = X.eval_functional(Place(pt))
        c = F.random(rng) or F.one
        e = [F.add(a, F.mul(c, b)) for a, b in zip(e, v)]
    if any(x != 0 for x in e):
        out.append((f"evals{k}", e))
    return out


def clifford_scan(C: PlaneCurve, cliff_C: int, trials: int, rng, special=()) -> dict:
    """Sample extensions with floor((g-1)/2) <= deg D <= g-1 and track max h0(E).

    ``special`` is a list of divisors (e.g. members of known pencils) mixed
    into the divisor sampling; each draw picks a uniform functional and a
    structured one.
    """
    g = C.genus
    lo, hi = (g - 1) // 2, g - 1
    bound = g + 1 - cliff_C
    special = [S for S in special if lo <= S.degree <= hi]
    best = -1
    best_row = None
    exceeded = 0
    rows = 0
    for t in range(trials):
        if special and t % 2 == 1:
            D = special[int(rng.integers(0, len(special)))]
        else:
            D = random_effective(C, int(rng.integers(lo, hi + 1)), rng)
        X = extension_space(C, D)
        if X.dim == 0:
            continue
        cands = [("uniform", random_functional(C, X.dim, rng))]
        cands += structured_functionals(C, D, rng)
        for kind, e in cands:
            rep = h0_ext(C, D, e)
            rows += 1
            if rep.h0_E > bound:
                exceeded += 1
            if rep.h0_E > best:
                best = rep.h0_E
                best_row = {"kind": kind, "D": repr(D), **rep.as_dict()}
    return {"bound": bound, "max_h0_E": best, "exceeded": exceeded, "samples": rows, "argmax": best_row}


def mukai_scan(C: PlaneCurve, trials: int, rng, pool) -> dict:
    """Randomized (D, D', e) checks of h0(E(-D')) >= h0(E) - deg D' with D' base point free."""
    g = C.genus
    pool = [Dp for Dp in pool if not base_points(C, Dp)]
    if not pool:
        raise BasePointError("no base point free divisor in the pool")
    failures = []
    rows = 0
    for t in range(trials):
        D = random_effective(C, int(rng.integers(0, g)), rng)
        Dp = pool[int(rng.integers(0, len(pool)))]
        X = extension_space(C, D)
        if X.dim == 0:
            continue
        cands = [random_functional(C, X.dim, rng)] if t % 2 == 0 else [e for _, e in structured_functionals(C, D, rng)]
        for e in cands:
            rows += 1
            lhs = twist_h0(C, D, Dp, e)
            rhs = h0_ext(C, D, e).h0_E - Dp.degree
            if lhs < rhs:
                failures.append({"D": repr(D), "Dp": repr(Dp), "lhs": lhs, "rhs": rhs})
    return {"samples": rows, "failures": failures, "pool_degrees": [Dp.degree for Dp in pool]}
