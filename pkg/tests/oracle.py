"""Independent reference implementations used by the tests.

Nothing here imports the package's arithmetic: tables are written out from
the multiplication rules, scalars are ``fractions.Fraction`` (or pairs of
them for Gaussian rationals), and checks are plain loops.
"""

from __future__ import annotations

import itertools
from fractions import Fraction


def table(family: str, n: int) -> dict:
    """``{(i, j): {k: c}}`` with 1-based indices, from the product rules."""
    out = {}

    def put(i, j, k, c=1):
        out.setdefault((i, j), {})
        out[(i, j)][k] = out[(i, j)].get(k, 0) + c

    top = n if family == "mu0" else n - 1
    for i in range(1, top + 1):
        for j in range(1, top + 1):
            if i + j <= top:
                put(i, j, i + j)
    if family == "mu12":
        put(n, n, n - 1)
    elif family == "mu13":
        put(1, n, n - 1)
    elif family == "mu14":
        put(1, n, n - 1)
        put(n, n, n - 1)
    return out


class G:
    """Gaussian rational ``re + im*i`` on Fractions."""

    __slots__ = ("re", "im")

    def __init__(self, re, im=0):
        self.re, self.im = Fraction(re), Fraction(im)

    @staticmethod
    def of(v):
        if isinstance(v, G):
            return v
        if hasattr(v, "re") and hasattr(v, "im"):
            return G(Fraction(str(v.re)), Fraction(str(v.im)))
        return G(Fraction(str(v)))

    def __add__(self, o):
        o = G.of(o)
        return G(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, o):
        o = G.of(o)
        return G(self.re - o.re, self.im - o.im)

    def __mul__(self, o):
        o = G.of(o)
        return G(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = G.of(o)
        norm = o.re * o.re + o.im * o.im
        return self * G(o.re / norm, -o.im / norm)

    def __eq__(self, o):
        o = G.of(o)
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)


def to_g(m) -> list[list[G]]:
    """Rows of a package ``Matrix`` (or nested lists) as oracle scalars."""
    rows = m.rows if hasattr(m, "rows") else m
    return [[G.of(v) for v in r] for r in rows]


def det(rows) -> G:
    a = [[G.of(v) for v in r] for r in rows]
    n = len(a)
    d = G(1)
    for k in range(n):
        piv = next((r for r in range(k, n) if a[r][k]), None)
        if piv is None:
            return G(0)
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            d = d * G(-1)
        d = d * a[k][k]
        for r in range(k + 1, n):
            f = a[r][k] / a[k][k]
            if f:
                a[r] = [x - f * y for x, y in zip(a[r], a[k])]
    return d


def first_hom_failure(family: str, n: int, rows):
    """First 1-based pair ``(p, q)`` with ``phi(e_p)phi(e_q) != phi(e_p e_q)``, else ``None``."""
    t = table(family, n)
    m = [[G.of(v) for v in r] for r in rows]
    col = [[m[i][j] for i in range(n)] for j in range(n)]
    for p in range(1, n + 1):
        for q in range(1, n + 1):
            lhs = [G(0)] * n
            for (i, j), prods in t.items():
                x, y = col[p - 1][i - 1], col[q - 1][j - 1]
                if x and y:
                    for k, c in prods.items():
                        lhs[k - 1] = lhs[k - 1] + x * y * c
            rhs = [G(0)] * n
            for k, c in t.get((p, q), {}).items():
                rhs = [r + col[k - 1][s] * c for s, r in enumerate(rhs)]
            if lhs != rhs:
                return p, q
    return None


def is_automorphism(family: str, n: int, rows) -> bool:
    return not det(rows) == 0 and first_hom_failure(family, n, rows) is None


def compositions(j: int, i: int):
    """Ordered ``i``-tuples of positive integers summing to ``j``."""
    for cuts in itertools.combinations(range(1, j), i - 1):
        bounds = (0, *cuts, j)
        yield tuple(bounds[t + 1] - bounds[t] for t in range(i))


def composition_sum(a, i: int, j: int) -> Fraction:
    total = Fraction(0)
    for parts in compositions(j, i):
        term = Fraction(1)
        for k in parts:
            term *= Fraction(str(a[k - 1])) if k <= len(a) else 0
        total += term
    return total


def rank(vectors) -> int:
    rows = [[Fraction(str(v)) for v in vec] for vec in vectors]
    r = 0
    width = len(rows[0]) if rows else 0
    for c in range(width):
        piv = next((k for k in range(r, len(rows)) if rows[k][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for k in range(len(rows)):
            if k != r and rows[k][c]:
                f = rows[k][c] / rows[r][c]
                rows[k] = [x - f * y for x, y in zip(rows[k], rows[r])]
        r += 1
    return r


def power_dims(family: str, n: int) -> list[int]:
    """``dim A^1, dim A^2, ...`` down to 0 by spanning products of spanning sets."""
    t = table(family, n)

    def mult(x, y):
        z = [Fraction(0)] * n
        for (i, j), prods in t.items():
            if x[i - 1] and y[j - 1]:
                for k, c in prods.items():
                    z[k - 1] += x[i - 1] * y[j - 1] * c
        return z

    basis = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    levels = [basis]
    dims = [n]
    while dims[-1] and len(dims) <= n + 1:
        i = len(levels)
        gens = [
            mult(u, v) for k in range(1, i + 1) for u in levels[k - 1] for v in levels[i - k]
        ]
        kept = []
        for g in gens:
            if any(g) and rank(kept + [g]) > len(kept):
                kept.append(g)
        levels.append(kept)
        dims.append(len(kept))
    return dims


def mat_vec(rows, x):
    return [sum((G.of(a) * G.of(b) for a, b in zip(r, x)), G(0)) for r in rows]
