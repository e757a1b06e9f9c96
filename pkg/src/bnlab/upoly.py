"""Dense univariate polynomials over a field: coefficient lists, lowest degree first."""

from __future__ import annotations

from fractions import Fraction


def trim(f):
    f = list(f)
    while f and f[-1] == 0:
        f.pop()
    return f


def deg(f) -> int:
    return len(trim(f)) - 1


def add(F, f, g):
    n = max(len(f), len(g))
    f = list(f) + [F.zero] * (n - len(f))
    g = list(g) + [F.zero] * (n - len(g))
    return trim(F.add(a, b) for a, b in zip(f, g))


def mul(F, f, g):
    if not f or not g:
        return []
    out = [F.zero] * (len(f) + len(g) - 1)
    if F.kind == "prime":
        p = F.p
        out = [0] * (len(f) + len(g) - 1)
        for i, a in enumerate(f):
            if a:
                for j, b in enumerate(g):
                    out[i + j] += a * b
        return trim(x % p for x in out)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] += a * b
    return trim(out)


def divmod_(F, f, g):
    f = trim(f)
    g = trim(g)
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    if len(f) < len(g):
        return [], f
    inv = F.inv(g[-1])
    r = list(f)
    q = [F.zero] * (len(f) - len(g) + 1)
    for k in range(len(f) - len(g), -1, -1):
        c = F.mul(r[k + len(g) - 1], inv)
        q[k] = c
        if c != 0:
            for j, b in enumerate(g):
                r[k + j] = F.sub(r[k + j], F.mul(c, b))
    return trim(q), trim(r[: len(g) - 1])


def rem(F, f, g):
    return divmod_(F, f, g)[1]


def monic(F, f):
    f = trim(f)
    if not f:
        return f
    inv = F.inv(f[-1])
    return [F.mul(inv, a) for a in f]


def gcd(F, f, g):
    f, g = trim(f), trim(g)
    while g:
        f, g = g, rem(F, f, g)
    return monic(F, f)


def derivative(F, f):
    return trim(F.mul(F(k), a) for k, a in enumerate(f) if k)


def powmod(F, base, e, mod):
    result = [F.one]
    base = rem(F, base, mod)
    while e:
        if e & 1:
            result = rem(F, mul(F, result, base), mod)
        base = rem(F, mul(F, base, base), mod)
        e >>= 1
    return result


def evaluate(F, f, x):
    acc = F.zero
    for a in reversed(f):
        acc = F.add(F.mul(acc, x), a)
    return acc


def _distinct_roots_fp(F, f):
    p = F.p
    f = monic(F, f)
    if deg(f) <= 0:
        return []
    if p == 2:
        return [x for x in (0, 1) if evaluate(F, f, x) == 0]
    xp = powmod(F, [0, 1], p, f)
    g = gcd(F, f, add(F, xp, [0, p - 1]))
    out = []
    _split(F, g, out)
    return sorted(out)


def _split(F, g, out):
    p = F.p
    d = deg(g)
    if d <= 0:
        return
    if d == 1:
        out.append(F.neg(g[0]))
        return
    # deterministic shifts instead of random ones
    for a in range(p):
        h = powmod(F, [a, 1], (p - 1) // 2, g)
        h = gcd(F, g, add(F, h, [p - 1]))
        if 0 < deg(h) < d:
            _split(F, h, out)
            _split(F, divmod_(F, g, h)[0], out)
            return
    raise RuntimeError("root splitting failed")


def roots(F, f) -> dict:
    """Roots in the ground field with multiplicities."""
    f = trim(f)
    if deg(f) <= 0:
        return {}
    if F.kind == "prime":
        distinct = _distinct_roots_fp(F, f)
    else:
        distinct = _rational_roots(f)
    out = {}
    for r in distinct:
        k = 0
        lin = [F.neg(r), F.one]
        g = f
        while True:
            q, rr = divmod_(F, g, lin)
            if rr:
                break
            g = q
            k += 1
        out[r] = k
    return out


def _rational_roots(f):
    import sympy

    x = sympy.Symbol("x")
    poly = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(f)], x, domain="QQ")
    return sorted(Fraction(int(r.p), int(r.q)) for r in poly.ground_roots())


def is_squarefree(F, f) -> bool:
    f = trim(f)
    if deg(f) <= 0:
        return True
    return deg(gcd(F, f, derivative(F, f))) == 0


def strip_roots(F, f, rts: dict):
    g = trim(f)
    for r, k in rts.items():
        for _ in range(k):
            g, rr = divmod_(F, g, [F.neg(r), F.one])
            assert not rr
    return g
