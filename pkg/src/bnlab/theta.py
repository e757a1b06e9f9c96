"""Riemann theta functions, Kummer coordinates and hyperelliptic Jacobians.

Conventions
-----------
theta[eps, delta](z, tau) = sum_n exp(pi i (n+eps)^T tau (n+eps) + 2 pi i (n+eps)^T (z+delta)).
Second-order functions are theta2[sigma](z) = theta[sigma/2, 0](2z, 2tau) for sigma in {0,1}^g,
ordered lexicographically with sigma[0] most significant.

Lattice sums run over the ellipsoid ||U (n + c)|| <= R where Im tau = U^T U is the
Cholesky factorization, c = eps + Im(tau)^{-1} Im z centres the Gaussian, and R is
chosen from the Gaussian tail bound of Deconinck, Heil, Bobenko, van Hoeij and
Schmies so that the neglected terms are below ``tol`` after removing the factor
exp(pi y^T Y^{-1} y).

Hyperelliptic curves y^2 = prod (x - e_j) with real sorted branch points use
a-cycles around the cuts [e_{2i-1}, e_{2i}] and b-cycles through the gaps to
the right of cut i; Abel-Jacobi maps use the first branch point as basepoint and
integrate along the upper edge of the real axis, so the point (x, +1) carries
y(x + i0) and (x, -1) its negative.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

import mpmath
import numpy as np
from scipy import special

__all__ = [
    "ThetaBudgetError", "QuadratureError", "DegenerateKummer",
    "RiemannMatrix", "HyperellipticData", "ThetaChar",
    "theta", "theta2_vector", "theta2_hessian_table", "hyperelliptic_periods", "abel_jacobi",
    "half_period", "fay_points", "fay_residual", "quadrisecant_residual", "sv_ratios",
    "heisenberg_orbits", "heisenberg_dimension_oracle", "coble_solve",
    "gamma00_matrix", "gamma00_rank", "gamma00_member", "riemann_vanishing",
    "j_invariant_from_tau", "j_invariant_from_branch", "symplectic_transform", "random_symplectic",
]

LATTICE_BUDGET = 4_000_000


class ThetaBudgetError(RuntimeError):
    pass


class QuadratureError(RuntimeError):
    pass


class DegenerateKummer(ValueError):
    pass


@dataclass(frozen=True)
class ThetaChar:
    eps: tuple
    delta: tuple

    def __post_init__(self):
        for v in self.eps + self.delta:
            if v not in (0, 0.5):
                raise ValueError("characteristic entries must be 0 or 1/2")

    @property
    def parity(self) -> int:
        return int(round(4 * sum(a * b for a, b in zip(self.eps, self.delta)))) % 2

    @classmethod
    def from_index(cls, g: int, index: int) -> "ThetaChar":
        bits = [(index >> (2 * g - 1 - k)) & 1 for k in range(2 * g)]
        return cls(tuple(b / 2 for b in bits[:g]), tuple(b / 2 for b in bits[g:]))

    @classmethod
    def zero(cls, g: int) -> "ThetaChar":
        return cls((0,) * g, (0,) * g)


class RiemannMatrix:
    """A point of the Siegel upper half space with cached lattice data."""

    def __init__(self, tau, check: bool = True):
        tau = np.array(tau, dtype=complex)
        if tau.ndim != 2 or tau.shape[0] != tau.shape[1]:
            raise ValueError("tau must be square")
        if check and np.max(np.abs(tau - tau.T)) > 1e-12:
            raise ValueError("tau is not symmetric")
        self.tau = (tau + tau.T) / 2
        self.g = tau.shape[0]
        Y = self.tau.imag
        try:
            L = np.linalg.cholesky(Y)
        except np.linalg.LinAlgError as exc:
            raise ValueError("Im tau is not positive definite") from exc
        self.Y = Y
        self.Yinv = np.linalg.inv(Y)
        self.U = L.T  # Y = U^T U

    @cached_property
    def rho(self) -> float:
        """Shortest nonzero vector of the lattice sqrt(pi) U Z^g."""
        basis = np.sqrt(np.pi) * self.U
        r0 = min(np.linalg.norm(basis[:, i]) for i in range(self.g))
        pts = _box_points(self.Yinv * (r0**2 / np.pi), np.zeros(self.g))
        pts = pts[np.any(pts != 0, axis=1)]
        lens = np.linalg.norm(pts @ basis.T, axis=1)
        return float(lens.min())

    def radius(self, tol: float, order: int = 0) -> float:
        """Smallest R (in sqrt(pi)-scaled units) whose tail bound is below tol."""
        g, rho = self.g, self.rho
        unorm = np.linalg.norm(np.linalg.inv(np.sqrt(np.pi) * self.U), 2)
        pref = (g / 2) * (2 / rho) ** g * ((2 * np.pi) * unorm) ** order

        def bound(R):
            x = (R - rho / 2) ** 2
            a = (g + order) / 2
            return pref * special.gammaincc(a, x) * special.gamma(a)

        R = max((np.sqrt(g + 2 * order) + rho) / 2, 1.0)
        while bound(R) > tol:
            R *= 1.1
            if R > 60:
                raise ThetaBudgetError("tail bound radius exceeds cap")
        return R

    def doubled(self) -> "RiemannMatrix":
        return RiemannMatrix(2 * self.tau, check=False)


def _box_points(Q, center):
    """Integer points n with (n + center)^T Q^{-1} (n + center) <= 1 ... via a bounding box.

    ``Q`` is the inverse Gram matrix scaled so that the ellipsoid is {x : x^T Q^{-1} x <= 1};
    its diagonal bounds each coordinate.
    """
    half = np.sqrt(np.diag(Q))
    ranges = [np.arange(np.floor(-c - h), np.ceil(-c + h) + 1) for c, h in zip(center, half)]
    size = np.prod([len(r) for r in ranges], dtype=float)
    if size > LATTICE_BUDGET:
        raise ThetaBudgetError(f"lattice box of {size:.0f} points exceeds the budget")
    grid = np.stack(np.meshgrid(*ranges, indexing="ij"), axis=-1).reshape(-1, len(center))
    return grid


def _ellipsoid(rm: RiemannMatrix, center, R):
    """Lattice points n with ||sqrt(pi) U (n + center)|| <= R."""
    pts = _box_points(rm.Yinv * (R**2 / np.pi), center)
    v = (pts + center) @ (np.sqrt(np.pi) * rm.U).T
    return pts[np.einsum("ij,ij->i", v, v) <= R * R]


def _as_rm(tau) -> RiemannMatrix:
    return tau if isinstance(tau, RiemannMatrix) else RiemannMatrix(tau)


def theta(tau, z, char: ThetaChar | None = None, tol: float = 1e-14) -> complex:
    """Riemann theta with characteristic; error at most tol * exp(pi y^T Y^{-1} y)."""
    rm = _as_rm(tau)
    if tol < 1e-14:
        raise ValueError("tolerance below 1e-14 is not supported in double precision")
    char = char or ThetaChar.zero(rm.g)
    z = np.asarray(z, dtype=complex).reshape(rm.g)
    eps = np.array(char.eps, dtype=float)
    delta = np.array(char.delta, dtype=float)
    c = rm.Yinv @ z.imag
    R = rm.radius(tol)
    n = _ellipsoid(rm, eps + c, R) + eps
    phase = np.pi * 1j * np.einsum("ij,jk,ik->i", n, rm.tau, n) + 2j * np.pi * n @ (z + delta)
    return complex(np.exp(phase).sum())


def theta2_vector(tau, z, tol: float = 1e-14) -> np.ndarray:
    """Kummer coordinates (theta2[sigma](z))_sigma."""
    rm = _as_rm(tau)
    rm2 = rm.doubled()
    z = np.asarray(z, dtype=complex).reshape(rm.g)
    out = np.empty(2**rm.g, dtype=complex)
    for k, sigma in enumerate(itertools.product((0, 1), repeat=rm.g)):
        out[k] = theta(rm2, 2 * z, ThetaChar(tuple(s / 2 for s in sigma), (0,) * rm.g), tol)
    if np.max(np.abs(out)) < 1e-13:
        raise DegenerateKummer("all Kummer coordinates vanish")
    return out


def projective_distance(a, b) -> float:
    """sin of the angle between two complex lines, 0 iff proportional."""
    a = np.asarray(a) / np.linalg.norm(a)
    b = np.asarray(b) / np.linalg.norm(b)
    # orthogonal residual rather than sqrt(1 - cos^2), which bottoms out near 1e-8
    return float(np.linalg.norm(b - np.vdot(a, b) * a))


def sv_ratios(rows) -> np.ndarray:
    s = np.linalg.svd(np.asarray(rows), compute_uv=False)
    return s / s[0]


# ---------------------------------------------------------------------------
# hyperelliptic periods and Abel-Jacobi


def _phase(branch, x):
    """i^m with m = number of branch points to the right of x."""
    return 1j ** int(np.sum(branch > x))


def _cheb_integral(branch, a_idx, k_max, N):
    """int_{e_a}^{e_{a+1}} x^k dx / y(x + i0) for k < k_max, Gauss-Chebyshev with N nodes."""
    a, b = branch[a_idx], branch[a_idx + 1]
    j = np.arange(1, N + 1)
    x = (a + b) / 2 + (b - a) / 2 * np.cos((2 * j - 1) * np.pi / (2 * N))
    others = np.delete(branch, [a_idx, a_idx + 1])
    rest = np.sqrt(np.abs(np.prod(x[:, None] - others[None, :], axis=1)))
    ph = _phase(branch, (a + b) / 2)
    f = 1.0 / (ph * rest)
    return np.array([np.pi / N * np.sum(x**k * f) for k in range(k_max)])


@dataclass
class HyperellipticData:
    branch: np.ndarray
    A: np.ndarray  # a-periods, A[k, i] = int_{a_i} x^k dx/y
    B: np.ndarray
    tau: np.ndarray
    nodes: int
    symmetry_residual: float = 0.0
    flipped: bool = False  # b-cycles reversed so that Im tau > 0
    rm: RiemannMatrix = field(init=False, repr=False)

    def __post_init__(self):
        self.rm = RiemannMatrix(self.tau, check=False)

    @property
    def g(self) -> int:
        return (len(self.branch) - 2) // 2

    def to_json(self) -> dict:
        return {"branch": [float(b) for b in self.branch], "nodes": self.nodes}


def _period_tables(branch, N):
    g = (len(branch) - 2) // 2
    ints = [_cheb_integral(branch, a, g, N) for a in range(len(branch) - 1)]
    A = np.stack([2 * ints[2 * i] for i in range(g)], axis=1)
    B = np.stack([2 * sum(ints[2 * j + 1] for j in range(i, g)) for i in range(g)], axis=1)
    return A, B


def hyperelliptic_periods(branch, tol: float = 1e-11, n_start: int = 32, n_max: int = 1 << 16) -> HyperellipticData:
    branch = np.array(sorted(float(b) for b in branch))
    if len(branch) % 2 or len(branch) < 4:
        raise ValueError("need 2g+2 >= 4 branch points")
    if np.min(np.diff(branch)) <= 0:
        raise ValueError("branch points must be distinct")
    N = n_start
    A, B = _period_tables(branch, N)
    while True:
        N2 = 2 * N
        A2, B2 = _period_tables(branch, N2)
        t1 = np.linalg.solve(A, B)
        t2 = np.linalg.solve(A2, B2)
        A, B, N = A2, B2, N2
        if np.max(np.abs(t1 - t2)) <= tol:
            break
        if N >= n_max:
            raise QuadratureError("Gauss-Chebyshev doubling did not stabilize")
    tau = np.linalg.solve(A, B)
    flipped = False
    if np.all(np.linalg.eigvalsh((tau.imag + tau.imag.T) / 2) < 0):
        tau, B, flipped = -tau, -B, True
    asym = float(np.max(np.abs(tau - tau.T)))
    if asym > 1e-10:
        raise QuadratureError("period matrix is not symmetric")
    return HyperellipticData(branch, A, B, (tau + tau.T) / 2, N, asym, flipped)


def _partial_integral(branch, k_max, start_idx, x, n=64):
    """int_{e_start}^{x} x^k dx / y(x+i0) with no branch point strictly between, via x = e + s u^2."""
    e = branch[start_idx]
    span = x - e
    u, w = np.polynomial.legendre.leggauss(n)
    u = (u + 1) / 2
    w = w / 2
    t = e + span * u**2
    others = np.delete(branch, start_idx)
    # y = sqrt(t - e) * sqrt(prod others) on the upper edge; sqrt(t - e) = sqrt|span| u * (1 or i)
    prod = np.prod(t[:, None] - others[None, :], axis=1)
    ph = _phase(branch, (e + x) / 2)
    y = ph * np.sqrt(np.abs(span)) * u * np.sqrt(np.abs(prod))
    jac = 2 * span * u
    vals = jac / y
    return np.array([np.sum(w * t**k * vals) for k in range(k_max)])


def abel_jacobi(data: HyperellipticData, points, n: int = 64) -> np.ndarray:
    """Sum of normalized Abel-Jacobi images of (x, sheet) pairs, basepoint e_1."""
    g = data.g
    br = data.branch
    total = np.zeros(g, dtype=complex)
    for x, sheet in points:
        x = float(x)
        if sheet not in (1, -1):
            raise ValueError("sheet must be +1 or -1")
        if np.min(np.abs(br - x)) < 1e-8:
            raise ValueError("point too close to a branch point")
        raw = np.zeros(g, dtype=complex)
        if x < br[0]:
            raw += _partial_integral(br, g, 0, x, n)
        else:
            k = int(np.searchsorted(br, x)) - 1
            for a in range(k):
                raw += _cheb_integral(br, a, g, data.nodes)
            raw += _partial_integral(br, g, k, x, n)
        total += sheet * raw
    return np.linalg.solve(data.A, total)


def half_period(rm: RiemannMatrix, index: int) -> np.ndarray:
    """(m + tau n)/2 with the 2g bits of index read as (m, n)."""
    g = rm.g
    bits = [(index >> (2 * g - 1 - k)) & 1 for k in range(2 * g)]
    m = np.array(bits[:g], dtype=float)
    nn = np.array(bits[g:], dtype=float)
    return (m + rm.tau @ nn) / 2


def riemann_vanishing(data: HyperellipticData, divisors, tol: float = 1e-8) -> list:
    """Characteristics whose theta vanishes at the images of all given degree g-1 divisors."""
    hits = []
    zs = [abel_jacobi(data, D) for D in divisors]
    for idx in range(4**data.g):
        ch = ThetaChar.from_index(data.g, idx)
        vals = [abs(theta(data.rm, z, ch)) for z in zs]
        scale = max(abs(theta(data.rm, z, ThetaChar.from_index(data.g, j))) for z in zs[:1] for j in range(4**data.g))
        if max(vals) <= tol * scale:
            hits.append(ch)
    return hits


# ---------------------------------------------------------------------------
# Fay trisecants


def fay_points(data: HyperellipticData, pts, index: int = 0, rm: RiemannMatrix | None = None):
    """z-vectors of a(q+r), a(p+r), a(p+q) with a^2 = K - p - q - r - s, plus the involution point."""
    rm = rm or data.rm
    p, q, r, s = (abel_jacobi(data, [P]) for P in pts)
    h = half_period(rm, index)
    zs = [(q + r - p - s) / 2 + h, (p + r - q - s) / 2 + h, (p + q - r - s) / 2 + h]
    fourth = -(p + q + r + s) / 2 + h
    return zs, fourth


def fay_residual(data: HyperellipticData, pts, index: int = 0, rm: RiemannMatrix | None = None) -> dict:
    rm = rm or data.rm
    zs, _ = fay_points(data, pts, index, data.rm)
    rows = [_unit(theta2_vector(rm, z)) for z in zs]
    s = sv_ratios(rows)
    return {"residual": float(s[2]), "sv": [float(x) for x in s]}


def quadrisecant_residual(data: HyperellipticData, pts, index: int = 0, rm: RiemannMatrix | None = None) -> dict:
    rm = rm or data.rm
    zs, fourth = fay_points(data, pts, index, data.rm)
    rows = [_unit(theta2_vector(rm, z)) for z in zs + [fourth]]
    s = sv_ratios(rows)
    return {"residual": float(s[2]), "sigma2": float(s[1]), "sv": [float(x) for x in s]}


def _unit(v):
    return v / np.linalg.norm(v)


def random_points(data: HyperellipticData, count: int, rng, spread: float = 1.0) -> list:
    """Distinct real points (x, sheet) kept away from the branch points."""
    br = data.branch
    lo, hi = br[0] - spread, br[-1] + spread
    out = []
    while len(out) < count:
        x = float(rng.uniform(lo, hi))
        if np.min(np.abs(br - x)) > 0.05 and all(abs(x - y) > 0.05 for y, _ in out):
            out.append((x, int(rng.choice([-1, 1]))))
    return out


def perturbed(rm: RiemannMatrix, size: float, rng) -> RiemannMatrix:
    E = rng.normal(size=(rm.g, rm.g)) + 1j * rng.normal(size=(rm.g, rm.g))
    E = (E + E.T) / 2
    return RiemannMatrix(rm.tau + size * E / np.linalg.norm(E, 2), check=False)


# ---------------------------------------------------------------------------
# Heisenberg-invariant quartics


def _heisenberg_elements(g):
    """(translation a, sign character b) pairs acting by x_s -> (-1)^{b.s} x_{s+a}."""
    vecs = list(itertools.product((0, 1), repeat=g))
    return [(a, b) for a in vecs for b in vecs]


def _index(g):
    vecs = list(itertools.product((0, 1), repeat=g))
    return vecs, {v: i for i, v in enumerate(vecs)}


def _act(g, elem, monomial):
    """Image of a monomial (exponent tuple over the 2^g coordinates) and its sign."""
    vecs, pos = _index(g)
    a, b = elem
    out = [0] * len(vecs)
    sign = 1
    for i, e in enumerate(monomial):
        if e:
            s = vecs[i]
            t = tuple((x + y) % 2 for x, y in zip(s, a))
            out[pos[t]] += e
            if sum(x * y for x, y in zip(b, s)) % 2 and e % 2:
                sign = -sign
    return tuple(out), sign


def heisenberg_orbits(g: int, degree: int = 4) -> list:
    """Orbit sums of monomials of the given degree, as {monomial: coefficient} dicts."""
    if g > 4:
        raise ValueError("g <= 4 required")
    n = 2**g
    from .exact import homogeneous_monomials

    seen = set()
    out = []
    group = _heisenberg_elements(g)
    for m in homogeneous_monomials(n, degree):
        if m in seen:
            continue
        poly: dict = {}
        for h in group:
            img, sign = _act(g, h, m)
            seen.add(img)
            poly[img] = poly.get(img, 0) + sign
        poly = {k: v for k, v in poly.items() if v}
        if poly:
            out.append(dict(sorted(poly.items(), reverse=True)))
    return out


def apply_heisenberg(g: int, elem, poly: dict) -> dict:
    out: dict = {}
    for m, c in poly.items():
        img, sign = _act(g, elem, m)
        out[img] = out.get(img, 0) + sign * c
    return {k: v for k, v in out.items() if v}


def heisenberg_generators(g: int) -> list:
    unit = [tuple(1 if j == i else 0 for j in range(g)) for i in range(g)]
    zero = (0,) * g
    return [(u, zero) for u in unit] + [(zero, u) for u in unit]


def heisenberg_dimension_oracle(g: int, degree: int = 4) -> int:
    """Character average: mean over the group of the trace on Sym^degree."""
    vecs, pos = _index(g)
    n = len(vecs)
    total = 0.0
    for a, b in _heisenberg_elements(g):
        M = np.zeros((n, n))
        for i, s in enumerate(vecs):
            t = tuple((x + y) % 2 for x, y in zip(s, a))
            M[pos[t], i] = (-1) ** (sum(x * y for x, y in zip(b, s)) % 2)
        ev = np.linalg.eigvals(M)
        total += _complete_symmetric(ev, degree).real
    return int(round(total / len(vecs) ** 2))


def _complete_symmetric(ev, k):
    """h_k of the eigenvalues via Newton's identities."""
    p = [np.sum(ev**j) for j in range(k + 1)]
    h = [1.0 + 0j]
    for m in range(1, k + 1):
        h.append(sum(p[j] * h[m - j] for j in range(1, m + 1)) / m)
    return h[k]


def _poly_arrays(polys, nvars):
    out = []
    for poly in polys:
        E = np.array(list(poly.keys()), dtype=int).reshape(-1, nvars)
        c = np.array(list(poly.values()), dtype=float)
        out.append((E, c))
    return out


def _eval_with_grad(arrays, x):
    """Values and gradients of each polynomial at the point x."""
    n = len(x)
    vals = np.empty(len(arrays), dtype=complex)
    grads = np.empty((len(arrays), n), dtype=complex)
    for k, (E, c) in enumerate(arrays):
        mon = np.prod(x[None, :] ** E, axis=1)
        vals[k] = c @ mon
        for j in range(n):
            Ej = E.copy()
            mask = Ej[:, j] > 0
            Ej[mask, j] -= 1
            d = np.where(mask, E[:, j] * np.prod(x[None, :] ** Ej, axis=1), 0)
            grads[k, j] = c @ d
    return vals, grads


def coble_solve(tau, rng, n_samples: int | None = None, tol: float = 1e-8, n_fresh: int = 50) -> dict:
    """Invariant quartics singular along the Kummer, by an SVD nullspace of sampled conditions."""
    rm = _as_rm(tau)
    if rm.g != 3:
        raise ValueError("genus 3 required")
    orbits = heisenberg_orbits(3)
    arrays = _poly_arrays(orbits, 8)
    k = len(orbits)
    n_samples = n_samples or 3 * k
    if n_samples < 3 * k:
        raise ValueError("need at least three samples per unknown")

    def kummer_sample():
        z = rng.uniform(0, 1, rm.g) + rm.tau @ rng.uniform(0, 1, rm.g)
        return _unit(theta2_vector(rm, z))

    rows = []
    for _ in range(n_samples):
        v, G = _eval_with_grad(arrays, kummer_sample())
        rows.append(v)
        rows.extend(G.T)
    M = np.array(rows)
    M = M / np.linalg.norm(M, axis=1, keepdims=True)
    _, s, Vh = np.linalg.svd(M)
    ratios = s / s[0]
    dim = int(np.sum(ratios <= tol))
    if dim == 0:
        return {"nullspace_dim": 0, "singular_values": ratios.tolist(), "n_unknowns": k}
    coeffs = Vh[-1].conj()
    values = []
    grads = []
    cn = np.linalg.norm(coeffs)
    for _ in range(n_fresh):
        x = kummer_sample()
        v, G = _eval_with_grad(arrays, x)
        # relative to the size of the individual orbit terms
        scale = cn * max(np.linalg.norm(v), 1e-300)
        values.append(abs(coeffs @ v) / scale)
        grads.append(np.linalg.norm(coeffs @ G) / (cn * max(np.linalg.norm(G), 1e-300)))
    return {
        "nullspace_dim": dim,
        "n_unknowns": k,
        "coefficients": coeffs,
        "singular_values": ratios.tolist(),
        "max_value_residual": float(max(values)),
        "max_gradient_residual": float(max(grads)),
    }


# ---------------------------------------------------------------------------
# Gamma_00


def _hessian_rows(g):
    return [(j, k) for j in range(g) for k in range(j, g)]


def theta2_hessian_table(tau, tol: float = 1e-14, precision: int | None = None) -> list:
    """Rows [value; d_j d_k for j <= k] of theta2[sigma] at z = 0, columns indexed by sigma.

    With ``precision`` (decimal digits) the sums are evaluated in mpmath.
    """
    rm = _as_rm(tau)
    rm2 = rm.doubled()
    g = rm.g
    pairs = _hessian_rows(g)
    if precision is None:
        R = rm2.radius(tol, order=2)
        cols = []
        for sigma in itertools.product((0, 1), repeat=g):
            eps = np.array(sigma) / 2
            n = _ellipsoid(rm2, eps, R) + eps
            w = np.exp(np.pi * 1j * np.einsum("ij,jk,ik->i", n, rm2.tau, n))
            col = [w.sum()]
            for j, k in pairs:
                # d/dz of exp(2 pi i n.(2z)) brings 4 pi i n
                col.append(np.sum(w * (4j * np.pi) ** 2 * n[:, j] * n[:, k]))
            cols.append(col)
        return np.array(cols).T
    with mpmath.workdps(precision):
        tolmp = 10.0 ** (-min(precision - 5, 300))
        R = rm2.radius(max(tolmp, 1e-300), order=2) if tolmp > 1e-300 else rm2.radius(1e-300, order=2)
        tau2 = mpmath.matrix([[mpmath.mpc(str(x.real), str(x.imag)) for x in row] for row in rm2.tau])
        cols = []
        for sigma in itertools.product((0, 1), repeat=g):
            eps = np.array(sigma) / 2
            n = _ellipsoid(rm2, eps, R) + eps
            col = [mpmath.mpc(0)] * (1 + len(pairs))
            for vec in n:
                v = [mpmath.mpf(x) for x in vec]
                q = mpmath.fsum(v[a] * tau2[a, b] * v[b] for a in range(g) for b in range(g))
                w = mpmath.exp(mpmath.pi * 1j * q)
                col[0] += w
                for idx, (j, k) in enumerate(pairs, start=1):
                    col[idx] += w * (4j * mpmath.pi) ** 2 * v[j] * v[k]
            cols.append(col)
        return [[cols[c][r] for c in range(len(cols))] for r in range(1 + len(pairs))]


def gamma00_matrix(tau, precision: int | None = None):
    return theta2_hessian_table(tau, precision=precision)


def _normalized_svd(M, precision):
    if precision is None:
        A = np.asarray(M, dtype=complex)
        A = A / np.linalg.norm(A, axis=1, keepdims=True)
        U, s, Vh = np.linalg.svd(A)
        return s / s[0], Vh
    with mpmath.workdps(precision):
        A = mpmath.matrix(M)
        for i in range(A.rows):
            nrm = mpmath.sqrt(mpmath.fsum(abs(A[i, j]) ** 2 for j in range(A.cols)))
            for j in range(A.cols):
                A[i, j] /= nrm
        U, s, V = mpmath.svd_c(A)
        s = [s[i] for i in range(len(s))]
        ratios = np.array([float(x / s[0]) for x in s])
        Vh = np.array([[complex(V[i, j]) for j in range(V.cols)] for i in range(V.rows)])
        return ratios, Vh


def gamma00_rank(tau, threshold: float = 1e-8, precision: int | None = None) -> dict:
    M = gamma00_matrix(tau, precision)
    ratios, Vh = _normalized_svd(M, precision)
    rank = int(np.sum(ratios > threshold))
    ncols = len(M[0])
    null = Vh[rank:].conj() if rank < ncols else np.zeros((0, ncols))
    return {"rank": rank, "rows": len(M), "cols": ncols, "sv_ratios": [float(x) for x in ratios], "nullspace": null}


def gamma00_member(coeffs, tau, tol: float = 1e-8, precision: int | None = None) -> bool:
    M = np.array(gamma00_matrix(tau, precision), dtype=complex)
    c = np.asarray(coeffs, dtype=complex)
    scale = np.linalg.norm(M, axis=1) * np.linalg.norm(c)
    return bool(np.all(np.abs(M @ c) <= tol * scale))


def kummer_functional(tau, a) -> np.ndarray:
    """Coefficients of the section of |2 Theta| whose divisor is Theta_a + Theta_{-a}.

    Uses the addition formula theta(z+a) theta(z-a) = sum_sigma theta2[sigma](z) theta2[sigma](a).
    """
    return theta2_vector(tau, a)


# ---------------------------------------------------------------------------
# elliptic checks and symplectic changes of basis


def j_invariant_from_tau(tau) -> float:
    rm = _as_rm(np.atleast_2d(tau))
    t2 = theta(rm, [0], ThetaChar((0.5,), (0,)))
    t3 = theta(rm, [0], ThetaChar((0,), (0,)))
    lam = (t2 / t3) ** 4
    return complex(256 * (1 - lam + lam**2) ** 3 / (lam**2 * (1 - lam) ** 2))


def j_invariant_from_branch(branch) -> complex:
    e1, e2, e3, e4 = branch
    lam = ((e3 - e2) * (e4 - e1)) / ((e3 - e1) * (e4 - e2))
    return complex(256 * (1 - lam + lam**2) ** 3 / (lam**2 * (1 - lam) ** 2))


def symplectic_transform(tau, S) -> np.ndarray:
    """(A tau + B)(C tau + D)^{-1} for S = [[A, B], [C, D]]."""
    tau = np.asarray(tau)
    g = tau.shape[0]
    A, B, C, D = S[:g, :g], S[:g, g:], S[g:, :g], S[g:, g:]
    out = (A @ tau + B) @ np.linalg.inv(C @ tau + D)
    return (out + out.T) / 2


def random_symplectic(g: int, rng, steps: int = 3) -> np.ndarray:
    """Product of elementary integral symplectic matrices."""
    S = np.eye(2 * g, dtype=int)
    J = np.block([[np.zeros((g, g), int), np.eye(g, dtype=int)], [-np.eye(g, dtype=int), np.zeros((g, g), int)]])
    for _ in range(steps):
        kind = rng.integers(0, 3)
        if kind == 0:
            Bm = rng.integers(-1, 2, size=(g, g))
            Bm = np.triu(Bm) + np.triu(Bm, 1).T
            E = np.block([[np.eye(g, dtype=int), Bm], [np.zeros((g, g), int), np.eye(g, dtype=int)]])
        elif kind == 1:
            Am = np.eye(g, dtype=int)
            i, j = rng.choice(g, 2, replace=False) if g > 1 else (0, 0)
            if i != j:
                Am[i, j] = int(rng.choice([-1, 1]))
            E = np.block([[Am, np.zeros((g, g), int)], [np.zeros((g, g), int), np.linalg.inv(Am).T.round().astype(int)]])
        else:
            E = J
        S = E @ S
    assert np.array_equal(S.T @ J @ S, J)
    return S


def negative_control(data: HyperellipticData, quadruples, size: float = 1e-2, quad: bool = False) -> dict:
    """Residuals with tau moved to tau + i*size*I while the Abel-Jacobi points stay fixed.

    Single configurations can sit close to a line by accident, so the median
    over the supplied quadruples is the reported statistic.
    """
    bad = RiemannMatrix(data.tau + 1j * size * np.eye(data.g))
    f = quadrisecant_residual if quad else fay_residual
    res = [f(data, pts, 0, rm=bad)["residual"] for pts in quadruples]
    return {"median": float(np.median(res)), "min": float(np.min(res)), "residuals": res}
