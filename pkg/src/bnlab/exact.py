"""Exact scalars, dense matrices and sparse multivariate polynomials.

Two ground fields are supported: the rationals and prime fields F_p with
p < 2**62.  Inside matrices and polynomials, elements are stored raw (a
``Fraction`` or an ``int`` in ``[0, p)``) and every container carries its
field descriptor, so mixing fields is caught at the container level.
``FieldScalar`` is the tagged wrapper used at API boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import lcm
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "FieldMismatch",
    "Rationals",
    "PrimeField",
    "QQ",
    "GF",
    "FieldScalar",
    "Matrix",
    "mat_rank",
    "mat_nullspace",
    "mat_det",
    "MultiPoly",
    "poly_partial",
    "poly_eval",
    "poly_mul",
    "homogeneous_monomials",
]

MAX_PRIME = 1 << 62
# int64 elimination is safe while (p-1)**2 < 2**63
_NUMPY_PRIME_LIMIT = 1 << 31


class FieldMismatch(ValueError):
    pass


class Rationals:
    """The field Q; elements are ``Fraction`` instances."""

    kind = "rational"
    characteristic = 0
    zero = Fraction(0)
    one = Fraction(1)

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("QQ")

    def __repr__(self):
        return "QQ"

    def __call__(self, x) -> Fraction:
        if isinstance(x, FieldScalar):
            self.check(x.field)
            return x.value
        if isinstance(x, str):
            return Fraction(x)
        return Fraction(x)

    def check(self, other) -> None:
        if other != self:
            raise FieldMismatch(f"expected {self!r}, got {other!r}")

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / a

    def div(self, a, b):
        return a * self.inv(b)

    def to_str(self, a) -> str:
        return str(a)

    def to_json(self) -> dict:
        return {"type": "rational"}

    def random(self, rng, bound: int = 50) -> Fraction:
        return Fraction(int(rng.integers(-bound, bound + 1)), int(rng.integers(1, bound + 1)))


class PrimeField:
    """The prime field F_p; elements are ints in ``[0, p)``."""

    kind = "prime"
    zero = 0
    one = 1

    def __init__(self, p: int):
        p = int(p)
        if not 2 <= p < MAX_PRIME:
            raise ValueError(f"modulus {p} outside [2, 2**62)")
        if not _is_prime(p):
            raise ValueError(f"modulus {p} is not prime")
        self.p = p
        self.characteristic = p

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))

    def __repr__(self):
        return f"GF({self.p})"

    def __call__(self, x) -> int:
        if isinstance(x, FieldScalar):
            self.check(x.field)
            return x.value
        if isinstance(x, Fraction):
            return x.numerator % self.p * pow(x.denominator, -1, self.p) % self.p
        if isinstance(x, str):
            return self(Fraction(x))
        return int(x) % self.p

    def check(self, other) -> None:
        if other != self:
            raise FieldMismatch(f"expected {self!r}, got {other!r}")

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return a * b % self.p

    def neg(self, a):
        return -a % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, -1, self.p)

    def div(self, a, b):
        return a * self.inv(b) % self.p

    def to_str(self, a) -> str:
        return str(a)

    def to_json(self) -> dict:
        return {"type": "prime", "modulus": self.p}

    def random(self, rng, bound=None) -> int:
        return int(rng.integers(0, self.p))


QQ = Rationals()


@lru_cache(maxsize=None)
def GF(p: int) -> PrimeField:
    return PrimeField(p)


def field_from_json(desc: dict):
    kind = desc.get("type")
    if kind == "rational":
        return QQ
    if kind == "prime":
        return GF(int(desc["modulus"]))
    raise ValueError(f"unknown field type {kind!r}")


def _is_prime(n: int) -> bool:
    from sympy import isprime

    return bool(isprime(n))


@dataclass(frozen=True)
class FieldScalar:
    """A field element tagged with its field."""

    field: object
    value: object

    def __post_init__(self):
        object.__setattr__(self, "value", self.field(self.value))

    def _other(self, other):
        if isinstance(other, FieldScalar):
            if other.field != self.field:
                raise FieldMismatch(f"{self.field!r} vs {other.field!r}")
            return other.value
        return self.field(other)

    def __add__(self, other):
        return FieldScalar(self.field, self.field.add(self.value, self._other(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return FieldScalar(self.field, self.field.sub(self.value, self._other(other)))

    def __rsub__(self, other):
        return FieldScalar(self.field, self.field.sub(self._other(other), self.value))

    def __mul__(self, other):
        return FieldScalar(self.field, self.field.mul(self.value, self._other(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return FieldScalar(self.field, self.field.div(self.value, self._other(other)))

    def __neg__(self):
        return FieldScalar(self.field, self.field.neg(self.value))

    def __eq__(self, other):
        if isinstance(other, FieldScalar):
            return self.field == other.field and self.value == other.value
        try:
            return self.value == self.field(other)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash((self.field, self.value))

    def __str__(self):
        return self.field.to_str(self.value)


# ---------------------------------------------------------------------------
# matrices


class Matrix:
    """Dense immutable matrix over a single field, row-major."""

    __slots__ = ("field", "nrows", "ncols", "rows")

    def __init__(self, field, rows: Iterable[Sequence], ncols: int | None = None):
        conv = []
        for row in rows:
            r = []
            for x in row:
                if isinstance(x, FieldScalar) and x.field != field:
                    raise FieldMismatch(f"entry over {x.field!r} in matrix over {field!r}")
                r.append(field(x))
            conv.append(tuple(r))
        if ncols is None:
            ncols = len(conv[0]) if conv else 0
        if any(len(r) != ncols for r in conv):
            raise ValueError("ragged rows")
        self.field = field
        self.nrows = len(conv)
        self.ncols = ncols
        self.rows = tuple(conv)

    @classmethod
    def _raw(cls, field, rows, ncols):
        m = cls.__new__(cls)
        m.field = field
        m.rows = tuple(tuple(r) for r in rows)
        m.nrows = len(m.rows)
        m.ncols = ncols
        return m

    @classmethod
    def from_scalars(cls, nrows: int, ncols: int, entries: Sequence[FieldScalar]) -> "Matrix":
        if len(entries) != nrows * ncols:
            raise ValueError("entry count does not match shape")
        fields = {e.field for e in entries}
        if len(fields) > 1:
            raise FieldMismatch(f"mixed fields: {sorted(map(repr, fields))}")
        field = fields.pop() if fields else QQ
        rows = [[e.value for e in entries[i * ncols:(i + 1) * ncols]] for i in range(nrows)]
        return cls._raw(field, rows, ncols)

    @classmethod
    def zeros(cls, field, nrows, ncols):
        return cls._raw(field, [[field.zero] * ncols for _ in range(nrows)], ncols)

    @classmethod
    def identity(cls, field, n):
        return cls._raw(
            field, [[field.one if i == j else field.zero for j in range(n)] for i in range(n)], n
        )

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        return (
            isinstance(other, Matrix)
            and self.field == other.field
            and self.shape == other.shape
            and self.rows == other.rows
        )

    def __repr__(self):
        return f"Matrix({self.field!r}, {self.nrows}x{self.ncols})"

    def entry(self, i, j) -> FieldScalar:
        return FieldScalar(self.field, self.rows[i][j])

    def columns(self):
        return [tuple(r[j] for r in self.rows) for j in range(self.ncols)]

    def T(self) -> "Matrix":
        return Matrix._raw(self.field, self.columns(), self.nrows)

    def _same_field(self, other):
        if self.field != other.field:
            raise FieldMismatch(f"{self.field!r} vs {other.field!r}")

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._same_field(other)
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        F = self.field
        if F.kind == "prime" and F.p < _NUMPY_PRIME_LIMIT and self.ncols:
            a = np.array(self.rows, dtype=np.int64).reshape(self.nrows, self.ncols)
            b = np.array(other.rows, dtype=np.int64).reshape(other.nrows, other.ncols)
            out = _matmul_mod(a, b, F.p)
            return Matrix._raw(F, out.tolist(), other.ncols)
        cols = other.columns()
        out = []
        for r in self.rows:
            out.append([_dot(F, r, c) for c in cols])
        return Matrix._raw(F, out, other.ncols)

    def __add__(self, other):
        self._same_field(other)
        F = self.field
        return Matrix._raw(
            F,
            [[F.add(a, b) for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)],
            self.ncols,
        )

    def scale(self, c):
        F = self.field
        c = F(c)
        return Matrix._raw(F, [[F.mul(c, a) for a in r] for r in self.rows], self.ncols)

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.rows for x in r)

    def rank(self) -> int:
        return mat_rank(self)

    def nullspace(self) -> "Matrix":
        return mat_nullspace(self)


def _dot(F, r, c):
    if F.kind == "prime":
        return sum(a * b for a, b in zip(r, c)) % F.p
    return sum((a * b for a, b in zip(r, c)), Fraction(0))


def _matmul_mod(a, b, p):
    # split the inner dimension so partial sums stay below 2**63
    chunk = max(1, (1 << 62) // ((p - 1) ** 2 or 1))
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    for k in range(0, a.shape[1], chunk):
        out = (out + a[:, k:k + chunk] @ b[k:k + chunk, :]) % p
    return out


def _echelon_modp_numpy(rows, ncols, p):
    """Reduced row echelon form mod p with int64 arithmetic."""
    a = np.array(rows, dtype=np.int64).reshape(len(rows), ncols) % p
    nr = a.shape[0]
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nr:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        a[r] = a[r] * pow(int(a[r, c]), -1, p) % p
        col = a[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            a[hit] = (a[hit] - np.outer(col[hit], a[r]) % p) % p
        pivots.append(c)
        r += 1
    return a[:r].tolist(), pivots


def _echelon_generic(F, rows, ncols):
    """Gauss-Jordan over any field with first-nonzero pivoting."""
    a = [list(r) for r in rows]
    nr = len(a)
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nr:
            break
        i = next((k for k in range(r, nr) if a[k][c] != 0), None)
        if i is None:
            continue
        a[r], a[i] = a[i], a[r]
        inv = F.inv(a[r][c])
        a[r] = [F.mul(inv, x) for x in a[r]]
        piv = a[r]
        for k in range(nr):
            if k != r and a[k][c] != 0:
                f = a[k][c]
                a[k] = [F.sub(x, F.mul(f, y)) for x, y in zip(a[k], piv)]
        pivots.append(c)
        r += 1
    return a[:r], pivots


def bareiss_rank(rows: Sequence[Sequence[Fraction]], ncols: int) -> int:
    """Rank over Q by fraction-free elimination on the row-scaled integer matrix."""
    a = []
    for row in rows:
        den = lcm(*(Fraction(x).denominator for x in row)) if row else 1
        a.append([int(Fraction(x) * den) for x in row])
    nr = len(a)
    r = 0
    prev = 1
    for c in range(ncols):
        if r == nr:
            break
        i = next((k for k in range(r, nr) if a[k][c] != 0), None)
        if i is None:
            continue
        a[r], a[i] = a[i], a[r]
        piv = a[r][c]
        for k in range(r + 1, nr):
            akc = a[k][c]
            a[k] = [(piv * x - akc * y) // prev for x, y in zip(a[k], a[r])]
        prev = piv
        r += 1
    return r


def echelon(m: Matrix):
    """Return (reduced rows, pivot columns) with deterministic pivoting."""
    F = m.field
    if m.nrows == 0 or m.ncols == 0:
        return [], []
    if F.kind == "prime" and F.p < _NUMPY_PRIME_LIMIT:
        return _echelon_modp_numpy(m.rows, m.ncols, F.p)
    return _echelon_generic(F, m.rows, m.ncols)


def mat_rank(m: Matrix) -> int:
    if m.nrows == 0 or m.ncols == 0:
        return 0
    if m.field.kind == "rational":
        return bareiss_rank(m.rows, m.ncols)
    return len(echelon(m)[1])


def mat_nullspace(m: Matrix) -> Matrix:
    """Right kernel basis, one basis vector per column of the result."""
    F = m.field
    n = m.ncols
    red, pivots = echelon(m)
    free = [j for j in range(n) if j not in set(pivots)]
    basis = []
    for f in free:
        v = [F.zero] * n
        v[f] = F.one
        for row, pc in zip(red, pivots):
            if row[f] != 0:
                v[pc] = F.neg(row[f])
        basis.append(v)
    return Matrix._raw(F, [[b[i] for b in basis] for i in range(n)], len(basis))


def mat_det(m: Matrix):
    """Determinant by elimination (raw field element)."""
    if m.nrows != m.ncols:
        raise ValueError("determinant of a non-square matrix")
    F = m.field
    a = [list(r) for r in m.rows]
    n = m.nrows
    det = F.one
    for c in range(n):
        i = next((k for k in range(c, n) if a[k][c] != 0), None)
        if i is None:
            return F.zero
        if i != c:
            a[c], a[i] = a[i], a[c]
            det = F.neg(det)
        det = F.mul(det, a[c][c])
        inv = F.inv(a[c][c])
        for k in range(c + 1, n):
            if a[k][c] != 0:
                f = F.mul(a[k][c], inv)
                a[k] = [F.sub(x, F.mul(f, y)) for x, y in zip(a[k], a[c])]
    return det


def independent_rows(field, rows: Sequence[Sequence], ncols: int) -> list[int]:
    """Indices of a maximal independent subset, greedy in the given order."""
    if not rows:
        return []
    cols = Matrix._raw(field, [list(r) for r in rows], ncols).T()
    return echelon(cols)[1]


def solve_left(field, basis_rows: Sequence[Sequence], target: Sequence, ncols: int):
    """Coefficients c with sum c_i basis_i = target, or None if not in the span."""
    k = len(basis_rows)
    aug = Matrix._raw(field, [list(r[j] for r in basis_rows) + [target[j]] for j in range(ncols)], k + 1)
    red, piv = echelon(aug)
    if k in piv:
        return None
    coeffs = [field.zero] * k
    for row, pc in zip(red, piv):
        coeffs[pc] = row[k]
    return coeffs


# ---------------------------------------------------------------------------
# polynomials


def homogeneous_monomials(nvars: int, deg: int) -> list[tuple[int, ...]]:
    """Exponent vectors of total degree ``deg``, lexicographically descending."""
    return list(_monomials(nvars, deg))


@lru_cache(maxsize=None)
def _monomials(nvars, deg):
    if nvars == 0:
        return ((),) if deg == 0 else ()
    if nvars == 1:
        return ((deg,),)
    out = []
    for a in range(deg, -1, -1):
        for rest in _monomials(nvars - 1, deg - a):
            out.append((a,) + rest)
    return tuple(out)


class MultiPoly:
    """Sparse polynomial: exponent tuple -> nonzero raw coefficient."""

    __slots__ = ("field", "nvars", "terms")

    def __init__(self, field, nvars: int, terms: dict | None = None):
        self.field = field
        self.nvars = nvars
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != nvars:
                raise ValueError("exponent arity mismatch")
            c = field(c)
            if c != 0:
                clean[e] = field.add(clean.get(e, field.zero), c)
                if clean[e] == 0:
                    del clean[e]
        self.terms = clean

    @classmethod
    def _raw(cls, field, nvars, terms):
        f = cls.__new__(cls)
        f.field = field
        f.nvars = nvars
        f.terms = terms
        return f

    @classmethod
    def constant(cls, field, nvars, c=1):
        return cls(field, nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, field, nvars, i):
        e = [0] * nvars
        e[i] = 1
        return cls._raw(field, nvars, {tuple(e): field.one})

    @classmethod
    def from_vector(cls, field, monomials, coeffs):
        return cls._raw(field, len(monomials[0]), {e: c for e, c in zip(monomials, coeffs) if c != 0})

    def to_vector(self, monomials):
        return [self.terms.get(e, self.field.zero) for e in monomials]

    def __repr__(self):
        return f"MultiPoly({self.field!r}, {self.nvars}, {len(self.terms)} terms)"

    def __eq__(self, other):
        return (
            isinstance(other, MultiPoly)
            and self.field == other.field
            and self.nvars == other.nvars
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.field, self.nvars, frozenset(self.terms.items())))

    def is_zero(self):
        return not self.terms

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def _check(self, other):
        if self.field != other.field:
            raise FieldMismatch(f"{self.field!r} vs {other.field!r}")
        if self.nvars != other.nvars:
            raise ValueError("arity mismatch")

    def __add__(self, other):
        self._check(other)
        F = self.field
        t = dict(self.terms)
        for e, c in other.terms.items():
            v = F.add(t.get(e, F.zero), c)
            if v == 0:
                t.pop(e, None)
            else:
                t[e] = v
        return MultiPoly._raw(F, self.nvars, t)

    def __neg__(self):
        F = self.field
        return MultiPoly._raw(F, self.nvars, {e: F.neg(c) for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        F = self.field
        c = F(c)
        if c == 0:
            return MultiPoly._raw(F, self.nvars, {})
        return MultiPoly._raw(F, self.nvars, {e: F.mul(c, v) for e, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            return self.scale(other)
        return poly_mul(self, other)

    def __pow__(self, k: int):
        out = MultiPoly.constant(self.field, self.nvars)
        for _ in range(k):
            out = out * self
        return out

    def partial(self, i):
        return poly_partial(self, i)

    def __call__(self, *point):
        return poly_eval(self, point)

    def eval_raw(self, point):
        F = self.field
        if F.kind == "prime":
            p = F.p
            total = 0
            for e, c in self.terms.items():
                t = c
                for x, k in zip(point, e):
                    if k:
                        t = t * pow(x, k, p) % p
                total += t
            return total % p
        total = Fraction(0)
        for e, c in self.terms.items():
            t = c
            for x, k in zip(point, e):
                if k:
                    t *= x**k
            total += t
        return total

    def substitute_linear(self, images: Sequence["MultiPoly"]) -> "MultiPoly":
        """Compose with polynomials: x_i -> images[i] (used for coordinate changes)."""
        F = self.field
        nv = images[0].nvars
        out = MultiPoly._raw(F, nv, {})
        cache: dict = {}
        for e, c in self.terms.items():
            term = MultiPoly.constant(F, nv, c)
            for i, k in enumerate(e):
                if k:
                    key = (i, k)
                    if key not in cache:
                        cache[key] = images[i] ** k
                    term = term * cache[key]
            out = out + term
        return out


def poly_partial(f: MultiPoly, var_index: int) -> MultiPoly:
    if not 0 <= var_index < f.nvars:
        raise IndexError("variable index out of range")
    F = f.field
    t = {}
    for e, c in f.terms.items():
        k = e[var_index]
        if k:
            v = F.mul(F(k), c)
            if v != 0:
                e2 = list(e)
                e2[var_index] -= 1
                t[tuple(e2)] = v
    return MultiPoly._raw(F, f.nvars, t)


def poly_eval(f: MultiPoly, point: Sequence) -> FieldScalar:
    if len(point) != f.nvars:
        raise ValueError("arity mismatch")
    pt = []
    for x in point:
        if isinstance(x, FieldScalar) and x.field != f.field:
            raise FieldMismatch(f"{x.field!r} vs {f.field!r}")
        pt.append(f.field(x))
    return FieldScalar(f.field, f.eval_raw(pt))


def poly_mul(f: MultiPoly, g: MultiPoly) -> MultiPoly:
    f._check(g)
    F = f.field
    t: dict = {}
    if F.kind == "prime":
        p = F.p
        for e1, c1 in f.terms.items():
            for e2, c2 in g.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = (t.get(e, 0) + c1 * c2) % p
    else:
        for e1, c1 in f.terms.items():
            for e2, c2 in g.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, 0) + c1 * c2
    return MultiPoly._raw(F, f.nvars, {e: c for e, c in t.items() if c != 0})
