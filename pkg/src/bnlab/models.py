"""Construction of the fixed test curves and their distinguished divisors.

Curves are drawn from the linear system of plane curves of a given degree
having prescribed multiplicities at prescribed points, and accepted when the
singularities are ordinary with rational tangents, no other rational point is
singular, and a split-line reference adjoint exists.  The accepted models are
frozen as JSON under ``bnlab/data`` so that tests never depend on the search.
"""

from __future__ import annotations

import json
from importlib import resources

import numpy as np

from .curves import CurveError, Divisor, PlaneCurve, Place, curve_load
from .exact import GF, Matrix, MultiPoly, homogeneous_monomials, mat_nullspace

# genus 6 sextic nodes in general position; the genus 5 model adds one more
NODES4 = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1)]
NODES5 = NODES4 + [(1, 2, 3)]

STANDARD = {
    "quartic_g3": dict(degree=4, singular=[], cliff=1,
                       note="smooth plane quartic: projection from a point gives a g^1_3 and no g^1_2 exists"),
    "quintic_g4": dict(degree=5, singular=[((1, 0, 0), 2), ((0, 1, 0), 2)], cliff=1,
                       note="lines through a node cut a g^1_3; genus 4 curves are never hyperelliptic here (canonical map is an embedding, checked)"),
    "sextic_g5": dict(degree=6, singular=[(pt, 2) for pt in NODES5], cliff=2,
                      note="general 5-nodal sextic: no g^1_3 (checked by pencil search), lines through a node give g^1_4"),
    "sextic_g6": dict(degree=6, singular=[(pt, 2) for pt in NODES4], cliff=2,
                      note="general 4-nodal sextic: tetragonal, not trigonal and not a plane quintic"),
    "trigonal_g6": dict(degree=6, singular=[((0, 0, 1), 3), ((1, 0, 0), 2)], cliff=1,
                        note="sextic with an ordinary triple point and a node: projection from the triple point is a g^1_3"),
    "quintic_g6": dict(degree=5, singular=[], cliff=1,
                       note="smooth plane quintic: projection from a point gives a g^1_4, the g^2_5 has Clifford index 1"),
}


def multiplicity_conditions(field, degree, point, m):
    """Rows forcing multiplicity >= m at ``point``: all order-(m-1) partials vanish."""
    mons = homogeneous_monomials(3, degree)
    rows = []
    for alpha in homogeneous_monomials(3, m - 1):
        row = []
        for e in mons:
            if any(a > b for a, b in zip(alpha, e)):
                row.append(0)
                continue
            coeff = 1
            for a, b in zip(alpha, e):
                for k in range(a):
                    coeff *= b - k
            val = coeff
            for x, k in zip(point, (b - a for a, b in zip(alpha, e))):
                val *= x**k
            row.append(field(val))
        rows.append(row)
    return rows


def random_curve(field, degree, singular, rng, name="", max_tries=200) -> PlaneCurve:
    """Random member of the linear system with the prescribed singular points."""
    mons = homogeneous_monomials(3, degree)
    rows = []
    for pt, m in singular:
        rows.extend(multiplicity_conditions(field, degree, pt, m))
    if rows:
        basis = mat_nullspace(Matrix(field, rows)).columns()
    else:
        basis = [tuple(1 if i == j else 0 for i in range(len(mons))) for j in range(len(mons))]
    for _ in range(max_tries):
        c = [0] * len(mons)
        for b in basis:
            lam = int(rng.integers(0, field.p))
            c = [(x + lam * y) % field.p for x, y in zip(c, b)]
        poly = MultiPoly.from_vector(field, mons, c)
        try:
            C = PlaneCurve(field, poly, singular, name=name)
            C.rational_points
            C.reference_adjoint()
        except CurveError:
            continue
        return C
    raise CurveError(f"no acceptable curve of degree {degree} after {max_tries} draws")


def build_standard(p=1009, seed=20240601) -> dict:
    rng = np.random.default_rng(seed)
    F = GF(p)
    out = {}
    for name, recipe in STANDARD.items():
        C = random_curve(F, recipe["degree"], recipe["singular"], rng, name=name)
        out[name] = C
    return out


def curve_description(C: PlaneCurve, cliff: int, note: str) -> dict:
    desc = C.to_json()
    desc.pop("rational_points", None)
    desc["cliff"] = cliff
    desc["notes"] = note
    return desc


def load_standard(name: str) -> PlaneCurve:
    """Load one of the frozen test curves shipped with the package."""
    text = resources.files("bnlab").joinpath("data", f"{name}.json").read_text()
    return curve_load(json.loads(text))


def standard_description(name: str) -> dict:
    return json.loads(resources.files("bnlab").joinpath("data", f"{name}.json").read_text())


# ---------------------------------------------------------------------------
# distinguished divisors


def node_lines(C: PlaneCurve, node) -> list:
    """Split lines through a node, meeting each branch once: they cut H - D_node."""
    out = []
    for Q in C.rational_points:
        L = C.line_through(node, Q)
        if not L.split or any(L.places[P] != 1 for P in C.branch_places(node)):
            continue
        if any(P.point in C._singular_set and P.point != node for P in L.places.support()):
            continue
        if L.form not in {x.form for x in out}:
            out.append(L)
            if len(out) >= 3:
                break
    if not out:
        raise CurveError(f"no split line through {node}")
    return out


def nodal_divisor(C: PlaneCurve, node) -> Divisor:
    """The two places of the normalization over a node."""
    return Divisor.of_places(C.branch_places(node))


def pencil_through(C: PlaneCurve, point, index=0) -> Divisor:
    """Residual of a split line through ``point`` (a singular or smooth point)."""
    L = node_lines(C, point)[index] if point in C._singular_set else _smooth_point_line(C, point, index)
    return L.places - Divisor([(P, L.places[P]) for P in L.places.support() if P.point == point])


def _smooth_point_line(C, point, index):
    found = 0
    for Q in C.rational_points:
        if Q == point:
            continue
        L = C.line_through(point, Q)
        if L.split and L.places[Place(point)] == 1 and not any(P.point in C._singular_set for P in L.places.support()):
            if found == index:
                return L
            found += 1
    raise CurveError("no split line through the point")


def line_section(C: PlaneCurve, index=0) -> Divisor:
    """A split line avoiding the singular points."""
    pts = C.rational_points
    found = 0
    for i in range(len(pts)):
        for j in range(i + 1, min(len(pts), i + 40)):
            L = C.line_through(pts[i], pts[j])
            if L.split and not any(P.point in C._singular_set for P in L.places.support()):
                if found == index:
                    return L.places
                found += 1
    raise CurveError("no split line section found")


def bpf_pool(C: PlaneCurve, size=6) -> list:
    """Base-point-free divisors from lines: sections, projections and pencils through singular points."""
    pool = [line_section(C, k) for k in range(2)]
    for pt, _ in C.singular_points:
        pool.append(pencil_through(C, pt))
    for pt in C.rational_points[: max(0, size - len(pool))]:
        try:
            pool.append(pencil_through(C, pt))
        except CurveError:
            continue
    return pool[:size]
