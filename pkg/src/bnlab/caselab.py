"""Genus-specific computations on canonical models (genus 4, 5 and 6)."""

from __future__ import annotations

from dataclasses import dataclass

from . import upoly
from .curves import CurveError, Divisor, PlaneCurve, Place, solve_columns
from .exact import Matrix, MultiPoly, homogeneous_monomials, mat_det, mat_nullspace, mat_rank
from .models import nodal_divisor, node_lines
from .strata import delta_form, eval_class, omega0


@dataclass
class CanonicalModel:
    curve: PlaneCurve
    basis: list  # numerators of the canonical series
    points: list  # canonical images of cached smooth points

    @property
    def genus(self):
        return self.curve.genus


def canonical_model(C: PlaneCurve) -> CanonicalModel:
    L = C.canonical_series()
    pts = []
    for pt in C.rational_points:
        v = tuple(g.eval_raw(pt) for g in L.numerators)
        if any(x != 0 for x in v):
            pts.append(v)
    M = CanonicalModel(C, L.numerators, pts)
    if mat_rank(Matrix._raw(C.field, pts[: 4 * C.genus], C.genus)) != C.genus:
        raise CurveError("canonical map is degenerate")
    return M


def _forms_through(M: CanonicalModel, degree: int, extra: int = 10) -> list:
    """Forms of the given degree in g variables vanishing on the canonical curve.

    A form of degree k vanishing at more than k(2g-2) points of the canonical
    curve vanishes on it, so that many points give an exact answer.
    """
    F = M.curve.field
    g = M.genus
    mons = homogeneous_monomials(g, degree)
    need = degree * (2 * g - 2) + 1 + extra
    if len(M.points) < need:
        raise CurveError("insufficient canonical points")
    rows = []
    for v in M.points[:need]:
        rows.append([_mono_val(F, v, e) for e in mons])
    null = mat_nullspace(Matrix._raw(F, rows, len(mons))).columns()
    return [MultiPoly.from_vector(F, mons, c) for c in null]


def _pow(F, x, k):
    return pow(x, k, F.p) if F.kind == "prime" else x**k


def _mono_val(F, v, e):
    out = F.one
    for x, k in zip(v, e):
        if k:
            out = F.mul(out, _pow(F, x, k))
    return out


def quadrics_through_canonical(M: CanonicalModel) -> list:
    return _forms_through(M, 2)


def cubics_through_canonical(M: CanonicalModel) -> list:
    return _forms_through(M, 3)


def _span_rank(F, polys, mons):
    if not polys:
        return 0
    return mat_rank(Matrix._raw(F, [p.to_vector(mons) for p in polys], len(mons)))


# ---------------------------------------------------------------------------
# genus 4


@dataclass
class Genus4Data:
    Q: MultiPoly
    cubics: list  # adapted basis: x_i*Q for i < 4, then one extra cubic
    dim_quadrics: int
    dim_cubics: int
    dim_linear_times_Q: int


def genus4_system(M: CanonicalModel) -> Genus4Data:
    F = M.curve.field
    if M.genus != 4:
        raise CurveError("genus 4 model required")
    quads = quadrics_through_canonical(M)
    cubs = cubics_through_canonical(M)
    if len(quads) != 1:
        return Genus4Data(quads[0] if quads else None, cubs, len(quads), len(cubs), 0)
    Q = quads[0]
    mons = homogeneous_monomials(4, 3)
    lq = [MultiPoly.variable(F, 4, i) * Q for i in range(4)]
    dim_lq = _span_rank(F, lq, mons)
    if _span_rank(F, cubs + lq, mons) != len(cubs):
        raise CurveError("x_i Q not contained in the cubic system")
    extra = next(f for f in cubs if _span_rank(F, lq + [f], mons) == dim_lq + 1)
    return Genus4Data(Q, lq + [extra], len(quads), len(cubs), dim_lq)


def _random_p3(F, rng):
    while True:
        v = tuple(F.random(rng) for _ in range(4))
        if any(v):
            return v


def cubic_threefold(data: Genus4Data, rng, n_fit: int = 40, n_holdout: int = 20) -> dict:
    """Implicitize the image of P^3 under the cubic system by interpolation."""
    F = data.Q.field
    mons = homogeneous_monomials(5, 3)
    samples = []
    while len(samples) < n_fit + n_holdout:
        z = _random_p3(F, rng)
        w = tuple(f.eval_raw(z) for f in data.cubics)
        if any(w):
            samples.append(w)
    fit, hold = samples[:n_fit], samples[n_fit:]
    rows = [[_mono_val(F, w, e) for e in mons] for w in fit]
    null = mat_nullspace(Matrix._raw(F, rows, len(mons))).columns()
    quad_mons = homogeneous_monomials(5, 2)
    qrows = [[_mono_val(F, w, e) for e in quad_mons] for w in fit]
    quad_null = len(mat_nullspace(Matrix._raw(F, qrows, len(quad_mons))).columns())
    T = MultiPoly.from_vector(F, mons, null[0]) if null else None
    held = [T.eval_raw(w) for w in hold] if T is not None else []
    return {
        "T": T,
        "nullspace_dim": len(null),
        "quadric_nullspace_dim": quad_null,
        "holdout_zero": bool(held) and all(x == 0 for x in held),
        "n_fit": n_fit,
        "n_holdout": n_holdout,
    }


def points_on_quadric_off_curve(data: Genus4Data, M: CanonicalModel, count: int, rng) -> list:
    F = data.Q.field
    out = []
    while len(out) < count:
        a = [F.random(rng) for _ in range(3)]
        # Q(a0, a1, a2, x) as a polynomial in x
        coeffs = [F.zero] * 3
        for e, c in data.Q.terms.items():
            t = c
            for x, k in zip(a, e[:3]):
                t = F.mul(t, _pow(F, x, k))
            coeffs[e[3]] = F.add(coeffs[e[3]], t)
        for r in upoly.roots(F, coeffs):
            z = tuple(a) + (r,)
            if any(z) and not all(f.eval_raw(z) == 0 for f in data.cubics):
                out.append(z)
    return out[:count]


def node_check(T: MultiPoly, data: Genus4Data, M: CanonicalModel, rng, n_points: int = 5) -> dict:
    """Double point of T at the common image of Q minus C and its tangent cone."""
    F = T.field
    zs = points_on_quadric_off_curve(data, M, n_points, rng)
    images = [tuple(f.eval_raw(z) for f in data.cubics) for z in zs]
    norm = [_normalize(F, w) for w in images]
    same = all(w == norm[0] for w in norm)
    t0 = norm[0]
    grad = [T.partial(i).eval_raw(t0) for i in range(5)]
    hess = [[T.partial(i).partial(j).eval_raw(t0) for j in range(5)] for i in range(5)]
    # tangent cone in the chart of the first nonzero coordinate of t0
    chart = next(i for i, x in enumerate(t0) if x != 0)
    others = [i for i in range(5) if i != chart]
    images_sub = []
    for i in range(5):
        if i == chart:
            images_sub.append(MultiPoly.constant(F, 4, 1))
        else:
            k = others.index(i)
            images_sub.append(MultiPoly(F, 4, {(0,) * 4: t0[i], tuple(1 if j == k else 0 for j in range(4)): 1}))
    shifted = T.substitute_linear(images_sub)
    low = min((sum(e) for e in shifted.terms), default=None)
    cone = MultiPoly._raw(F, 4, {e: c for e, c in shifted.terms.items() if sum(e) == low})
    proportional = _proportional(F, cone, data.Q)
    return {
        "t0": [int(x) for x in t0],
        "images_agree": same,
        "value": int(T.eval_raw(t0)),
        "gradient_zero": all(x == 0 for x in grad),
        "hessian_nonzero": any(x != 0 for row in hess for x in row),
        "tangent_cone_degree": low,
        "cone_proportional_to_Q": proportional,
        "chart": chart,
    }


def _normalize(F, w):
    for x in w:
        if x != 0:
            inv = F.inv(x)
            return tuple(F.mul(inv, y) for y in w)
    raise CurveError("zero image")


def _proportional(F, f: MultiPoly, g: MultiPoly) -> bool:
    if f.is_zero() or g.is_zero() or set(f.terms) != set(g.terms):
        return False
    e0 = next(iter(g.terms))
    lam = F.div(f.terms[e0], g.terms[e0])
    return all(f.terms[e] == F.mul(lam, c) for e, c in g.terms.items())


def directional(f: MultiPoly, direction) -> MultiPoly:
    F = f.field
    out = MultiPoly._raw(F, f.nvars, {})
    for i, v in enumerate(direction):
        v = F(v)
        if v != 0:
            out = out + f.partial(i).scale(v)
    return out


def alpha_quartic(Q: MultiPoly, direction, f: MultiPoly) -> MultiPoly:
    """q*D(f) - f*D(q) for the directional derivative D along ``direction``."""
    return Q * directional(f, direction) - f * directional(Q, direction)


def alpha_checks(data: Genus4Data, M: CanonicalModel, rng, trials: int = 5) -> dict:
    F = data.Q.field
    Q = data.Q
    vanish = True
    diff_ok = True
    linear_ok = True
    for _ in range(trials):
        v = [F.random(rng) for _ in range(4)]
        w = [F.random(rng) for _ in range(4)]
        lam = [F.random(rng) for _ in data.cubics]
        f = MultiPoly._raw(F, 4, {})
        for c, g in zip(lam, data.cubics):
            f = f + g.scale(c)
        a = alpha_quartic(Q, v, f)
        vanish &= all(a.eval_raw(p) == 0 for p in M.points)
        ell = MultiPoly(F, 4, {tuple(1 if j == i else 0 for j in range(4)): F.random(rng) for i in range(4)})
        lhs = alpha_quartic(Q, v, f + ell * Q) - a
        rhs = Q * Q * directional(ell, v)
        diff_ok &= lhs == rhs
        vw = [F.add(x, y) for x, y in zip(v, w)]
        linear_ok &= alpha_quartic(Q, vw, f) == a + alpha_quartic(Q, w, f)
    zero_dir = alpha_quartic(Q, [0, 0, 0, 0], data.cubics[-1]).is_zero()
    return {"vanish_on_curve": vanish, "q2_difference": diff_ok, "linear_in_direction": linear_ok,
            "zero_direction_zero": zero_dir, "trials": trials}


def trigonal_pencils_g4(C: PlaneCurve, rng, pool_size: int = 40, max_triples: int = 4000) -> list:
    """Bounded search for triples of pool points spanning a g^1_3."""
    from itertools import combinations

    pts = C.rational_points[:pool_size]
    found = []
    for i, tri in enumerate(combinations(pts, 3)):
        if i >= max_triples:
            break
        D = Divisor([(Place(p), 1) for p in tri])
        if C.h0(D) == 2:
            found.append(D)
    return found


# ---------------------------------------------------------------------------
# genus 5


def quadric_matrix(F, Q: MultiPoly, n: int) -> list:
    """Symmetric matrix A with x^T A x = Q (requires odd characteristic)."""
    half = F.inv(F(2))
    A = [[F.zero] * n for _ in range(n)]
    for e, c in Q.terms.items():
        idx = [i for i, k in enumerate(e) for _ in range(k)]
        i, j = idx
        if i == j:
            A[i][i] = F.add(A[i][i], c)
        else:
            h = F.mul(c, half)
            A[i][j] = F.add(A[i][j], h)
            A[j][i] = F.add(A[j][i], h)
    return A


def discriminant_quintic(net, rng, n_roots: int = 25) -> dict:
    """det(l0 A0 + l1 A1 + l2 A2) as a ternary form, fitted by interpolation."""
    A0, A1, A2, F = net
    n = len(A0)
    mons = homogeneous_monomials(3, n)

    def pencil(lam):
        return net_pencil(net, lam)

    pts = []
    vals = []
    while len(pts) < len(mons) + 10:
        lam = tuple(F.random(rng) for _ in range(3))
        pts.append(lam)
        vals.append(mat_det(pencil(lam)))
    rows = [[_mono_val(F, lam, e) for e in mons] + [v] for lam, v in zip(pts, vals)]
    sol = solve_columns(F, [r[:-1] for r in rows], [[r[-1]] for r in rows], len(mons))
    if sol is None:
        raise CurveError("determinant is not a form of the expected degree")
    gamma = MultiPoly.from_vector(F, mons, [s[0] for s in sol])
    if gamma.is_zero():
        raise CurveError("degenerate net: identically zero discriminant")
    # sample zeros: fix (l1, l2), solve for l0
    zeros = []
    ranks = []
    tries = 0
    while len(zeros) < n_roots and tries < 50 * n_roots:
        tries += 1
        b, c = F.random(rng), F.random(rng)
        coeffs = [F.zero] * (n + 1)
        for e, v in gamma.terms.items():
            coeffs[e[0]] = F.add(coeffs[e[0]], F.mul(v, F.mul(_pow(F, b, e[1]), _pow(F, c, e[2]))))
        for r in upoly.roots(F, coeffs):
            lam = (r, b, c)
            if lam not in zeros and any(lam):
                zeros.append(lam)
                ranks.append(mat_rank(pencil(lam)))
    # singular points of the discriminant among the sampled zeros, if any
    grads = [gamma.partial(i) for i in range(3)]
    sing = [(z, r) for z, r in zip(zeros, ranks) if all(g.eval_raw(z) == 0 for g in grads)]
    return {
        "gamma": gamma,
        "degree": gamma.degree(),
        "homogeneous": gamma.is_homogeneous(),
        "zeros": zeros[:n_roots],
        "ranks": ranks[:n_roots],
        "singular_zeros": sing,
    }


def genus5_net(M: CanonicalModel):
    F = M.curve.field
    quads = quadrics_through_canonical(M)
    if len(quads) != 3:
        raise CurveError(f"expected a net of quadrics, found dimension {len(quads)}")
    mats = [quadric_matrix(F, q, 5) for q in quads]
    return quads, (mats[0], mats[1], mats[2], F)


# ---------------------------------------------------------------------------
# genus 6


@dataclass
class TetragonalConfig:
    nodes: list
    nodal_divisors: list
    x: list  # x0 .. x4
    h0: list
    relation: list  # x0 + x_i ~ K - D_i for i = 1..4
    omega0_dims: list


def _conic_through_nodes(C: PlaneCurve, nodes):
    for (a, b), (c, d) in (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))):
        L1 = C.line_through(nodes[a], nodes[b])
        L2 = C.line_through(nodes[c], nodes[d])
        if L1.split and L2.split:
            return L1, L2
    raise CurveError("no split reducible conic through the four nodes")


def tetragonal_config(C: PlaneCurve) -> TetragonalConfig:
    nodes = [pt for pt, m in C.singular_points if m == 2]
    if C.genus != 6 or len(nodes) != 4:
        raise CurveError("a 4-nodal sextic is required")
    Ds = [nodal_divisor(C, n) for n in nodes]
    L1, L2 = _conic_through_nodes(C, nodes)
    x0 = L1.places + L2.places - sum(Ds[1:], Ds[0])
    xs = [x0]
    for n, Di in zip(nodes, Ds):
        L = node_lines(C, n)[0]
        xs.append(L.places - Di)
    K = C.canonical_divisor()
    h0 = [C.h0(x) for x in xs]
    rel = [C.lin_equiv(x0 + xs[i], K - Ds[i - 1]) is not None for i in range(1, 5)]
    om = [len(omega0(C, x)) for x in xs]
    return TetragonalConfig(nodes, Ds, xs, h0, rel, om)


def trigonal_pencil(C: PlaneCurve) -> Divisor:
    """Residual of a split line through the triple point: a member of the g^1_3."""
    triple = next(pt for pt, m in C.singular_points if m == 3)
    for Q in C.rational_points:
        L = C.line_through(triple, Q)
        if L.split and all(L.places[P] == 1 for P in C.branch_places(triple)):
            if not any(P.point in C._singular_set and P.point != triple for P in L.places.support()):
                return L.places - Divisor.of_places(C.branch_places(triple))
    raise CurveError("no split line through the triple point")


def trigonal_omega(C: PlaneCurve) -> dict:
    L = trigonal_pencil(C)
    K = C.canonical_divisor()
    D = K - L * 2
    return {"h0_L": C.h0(L), "deg_D": D.degree, "h0_D": C.h0(D), "omega0_dim": len(omega0(C, D)), "D": D}


def plane_quintic_omega(C: PlaneCurve, index: int = 0) -> dict:
    """D = L - p for a line section L through p: omega0 is spanned by eval_p."""
    if C.degree != 5 or C.singular_points:
        raise CurveError("a smooth plane quintic is required")
    count = 0
    for P in C.rational_points:
        for Q in C.rational_points:
            if Q == P:
                continue
            Lq = C.line_through(P, Q)
            if not Lq.split or Lq.places[Place(P)] != 1:
                continue
            if count < index:
                count += 1
                break
            p = Place(P)
            D = Lq.places - Divisor([(p, 1)])
            om = omega0(C, D)
            ev = eval_class(C, D, p)
            F = C.field
            prop = len(om) == 1 and mat_rank(Matrix._raw(F, [om[0], ev], len(ev))) == 1
            K = C.canonical_divisor()
            base = C.h0(K - D - Divisor([(p, 1)])) == C.h0(K - D)
            q = next(Place(x) for x in C.rational_points if Place(x) not in D.support() and x != P)
            return {
                "p": p,
                "D": D,
                "omega0_dim": len(om),
                "generator_prop_eval_p": prop,
                "p_is_base_point": base,
                "eval_q_index": mat_rank(delta_form(C, D, eval_class(C, D, q))),
            }
    raise CurveError("no split line found")



def net_pencil(net, lam) -> Matrix:
    A0, A1, A2, F = net
    n = len(A0)
    return Matrix._raw(F, [[F.add(F.add(F.mul(lam[0], A0[i][j]), F.mul(lam[1], A1[i][j])), F.mul(lam[2], A2[i][j]))
                            for j in range(n)] for i in range(n)], n)


def discriminant_point_check(gamma: MultiPoly, net, lam) -> dict:
    """Rank of the quadric at ``lam`` against the vanishing order of the discriminant there."""
    F = gamma.field
    grad = [gamma.partial(i).eval_raw(lam) for i in range(3)]
    return {
        "value_zero": gamma.eval_raw(lam) == 0,
        "gradient_zero": all(x == 0 for x in grad),
        "rank": mat_rank(net_pencil(net, lam)),
    }


def conjugate_net(net, P: Matrix):
    """The net P^T A_i P for an invertible P."""
    A0, A1, A2, F = net
    out = []
    for A in (A0, A1, A2):
        M = P.T() @ Matrix._raw(F, A, len(A)) @ P
        out.append([list(r) for r in M.rows])
    return (out[0], out[1], out[2], F)
