"""Closed-form automorphisms of the five families and the brute-force oracle.

Every automorphism is generated by ``phi(e_1) = sum a_i e_i``: the columns
``2 .. n`` (``2 .. n-1`` for filiform families) are the truncated powers of
that vector, and the filiform families add a family-specific last column.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from math import lcm

import numpy as np
from gmpy2 import mpq

from . import kernels
from .algebra import AlgebraFamily, Family, StructureConstants, make_algebra, multiply
from .linalg import (
    Matrix,
    _bareiss_det,
    float_matrix_singular,
    mat_mul,
    scale_to_integers,
)
from .scalars import (
    GaussQ,
    Q,
    TOL,
    close,
    fmt,
    is_exact,
    is_exact_like,
    is_zero,
    nth_roots,
    parse,
    to_complex,
)
from .verdict import Verdict


class ParamError(ValueError):
    pass


class NotInFamilyError(ValueError):
    def __init__(self, message: str, position=None):
        super().__init__(message)
        self.position = position


def _coerce(value):
    if value is None or isinstance(value, GaussQ):
        return value
    return Q(value) if is_exact(value) or isinstance(value, str) else to_complex(value)


@dataclass(frozen=True)
class AutoParams:
    family: AlgebraFamily
    a: tuple
    b_nm1: object = None
    b_n: object = None
    sqrt_a1: object = None

    def __post_init__(self):
        fam = self.family
        if not isinstance(fam, AlgebraFamily):
            raise ParamError("family must be an AlgebraFamily")
        object.__setattr__(self, "a", tuple(_coerce(v) for v in self.a))
        tag = fam.tag
        b_nm1 = self.b_nm1
        if tag.filiform and b_nm1 is None:
            b_nm1 = 0
        object.__setattr__(self, "b_nm1", _coerce(b_nm1))
        object.__setattr__(self, "b_n", _coerce(self.b_n))
        object.__setattr__(self, "sqrt_a1", _coerce(self.sqrt_a1))
        self._validate()

    def _validate(self):
        tag, n = self.family.tag, self.family.n
        if len(self.a) != n:
            raise ParamError(f"expected {n} values a_1..a_n, got {len(self.a)}")
        a1 = self.a[0]
        if is_zero(a1):
            raise ParamError("a_1 must be nonzero")
        if tag is Family.MU0 and self.b_nm1 is not None:
            raise ParamError("mu0 has no b_{n-1}")
        if tag is not Family.MU11 and self.b_n is not None:
            raise ParamError("b_n is a parameter of mu11 only")
        if tag is not Family.MU12 and self.sqrt_a1 is not None:
            raise ParamError("sqrt_a1 is a parameter of mu12 only")
        if tag is Family.MU11 and (self.b_n is None or is_zero(self.b_n)):
            raise ParamError("mu11 needs b_n != 0")
        if tag is Family.MU12:
            s = self.sqrt_a1
            if s is None or not close(s * s, a1):
                raise ParamError("mu12 needs sqrt_a1 with sqrt_a1**2 == a_1")
        if tag is Family.MU14 and not close(a1, Q(1)):
            raise ParamError("mu14 needs a_1 == 1")

    @property
    def n(self) -> int:
        return self.family.n

    def _values(self):
        return [v for v in (*self.a, self.b_nm1, self.b_n, self.sqrt_a1) if v is not None]

    @property
    def is_exact(self) -> bool:
        """All parameters rational."""
        return all(is_exact(v) for v in self._values())

    @property
    def is_exact_like(self) -> bool:
        """All parameters rational or Gaussian rational."""
        return all(is_exact_like(v) for v in self._values())

    def to_json(self) -> dict:
        out = {"family": self.family.tag.value, "n": self.n, "a": [fmt(v) for v in self.a]}
        for key in ("b_nm1", "b_n", "sqrt_a1"):
            v = getattr(self, key)
            if v is not None:
                out[key] = fmt(v)
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "AutoParams":
        try:
            fam = AlgebraFamily(Family.parse(obj["family"]), obj["n"])
            a = [parse(v) for v in obj["a"]]
        except (KeyError, TypeError) as exc:
            raise ParamError(f"malformed AutoParams JSON: {exc}") from exc
        extra = {k: parse(obj[k]) for k in ("b_nm1", "b_n", "sqrt_a1") if k in obj}
        return cls(fam, tuple(a), **extra)


# ---------------------------------------------------------------------------
# truncated powers


def truncated_powers(a, top: int) -> list[list]:
    """``pw[i][d] = [t^d] (sum_{m=1}^{top} a_m t^m)^i`` for ``0 <= i, d <= top``.

    ``a[0]`` holds ``a_1``; entries past ``top`` are ignored.
    """
    coeffs = list(a[:top]) + [0] * max(0, top - len(a))
    if all(is_exact(v) for v in coeffs):
        den = lcm(*(int(v.denominator) for v in coeffs)) if coeffs else 1
        ints = [0] + [int(v.numerator) * (den // int(v.denominator)) for v in coeffs]
        flat = kernels.int_powers(ints, top)
        w = top + 1
        out = []
        scale = 1
        for i in range(w):
            out.append([mpq(flat[i * w + d], scale) for d in range(w)])
            scale *= den
        return out
    if all(is_exact_like(v) for v in coeffs):
        zero, one = Q(0), Q(1)
        c = [zero] + [v if isinstance(v, GaussQ) else Q(v) for v in coeffs]
    else:
        zero, one = 0j, 1 + 0j
        c = [zero] + [to_complex(v) for v in coeffs]
    w = top + 1
    pw = [[zero] * w for _ in range(w)]
    pw[0][0] = one
    for i in range(1, w):
        prev, row = pw[i - 1], pw[i]
        for d in range(i, w):
            acc = zero
            for k in range(1, d - i + 2):
                if c[k] and prev[d - k]:
                    acc += c[k] * prev[d - k]
            row[d] = acc
    return pw


def composition_sum(a, i: int, j: int):
    """Sum over ordered ``(k_1..k_i)`` with ``k_1+..+k_i = j`` of ``a_{k_1}...a_{k_i}``."""
    n = len(a)
    if not 1 <= i <= j <= n:
        raise ValueError(f"need 1 <= i <= j <= {n}, got i={i}, j={j}")
    return truncated_powers(a, n)[i][j]


# ---------------------------------------------------------------------------
# construction


def _sqrt_power(s, a1, k: int):
    """``s**k`` for ``s**2 == a1``, using ``a1`` for the even part."""
    if k % 2 == 0:
        return a1 ** (k // 2)
    return s * a1 ** ((k - 1) // 2)


def last_column(p: AutoParams) -> list:
    """Image of ``e_n`` for the filiform families."""
    tag, n = p.family.tag, p.n
    a1, an = p.a[0], p.a[-1]
    zero = Q(0) if p.is_exact_like else 0j
    col = [zero] * n
    if tag is Family.MU11:
        col[n - 2], col[n - 1] = p.b_nm1, p.b_n
    elif tag is Family.MU12:
        s = p.sqrt_a1
        col[n - 3] = -an * _sqrt_power(s, a1, n - 3)
        col[n - 2] = p.b_nm1
        col[n - 1] = _sqrt_power(s, a1, n - 1)
    elif tag is Family.MU13:
        col[n - 2], col[n - 1] = p.b_nm1, a1 ** (n - 2)
    elif tag is Family.MU14:
        col[n - 3], col[n - 2], col[n - 1] = -an, p.b_nm1, a1 ** 0
    return col


def second_column_extra(p: AutoParams):
    """Additional ``e_{n-1}`` coefficient of ``phi(e_2)`` (zero for mu0, mu11)."""
    tag = p.family.tag
    a1, an = p.a[0], p.a[-1]
    if tag is Family.MU12:
        return an * an
    if tag is Family.MU13:
        return a1 * an
    if tag is Family.MU14:
        return a1 * an + an * an
    return None


def build_automorphism(p: AutoParams) -> Matrix:
    n, tag = p.n, p.family.tag
    exact = p.is_exact_like
    a = list(p.a) if exact else [to_complex(v) for v in p.a]
    if not exact:
        p = AutoParams(
            p.family,
            tuple(a),
            *(None if v is None else to_complex(v) for v in (p.b_nm1, p.b_n, p.sqrt_a1)),
        )
    zero = Q(0) if exact else 0j
    top = n if tag is Family.MU0 else n - 1
    pw = truncated_powers(a, top)
    cols = [list(a)]
    for i in range(2, top + 1):
        cols.append([pw[i][d] for d in range(1, top + 1)] + [zero] * (n - top))
    if tag.filiform:
        extra = second_column_extra(p)
        if extra is not None:
            cols[1][n - 2] += extra
        cols.append(last_column(p))
    return Matrix.from_columns(cols)


def compose(m1: Matrix, m2: Matrix) -> Matrix:
    """Matrix of ``m1 o m2`` (apply ``m2`` first)."""
    return mat_mul(m1, m2)


# ---------------------------------------------------------------------------
# oracle


def _dense_float(alg: StructureConstants) -> np.ndarray:
    c = alg.__dict__.get("_dense_float")
    if c is None:
        n = alg.n
        c = np.zeros((n, n, n))
        for i, j, k, v in alg.nonzero:
            c[i, j, k] = float(v)
        alg.__dict__["_dense_float"] = c
    return c


def _pair_detail(alg, m: Matrix, p: int, q: int) -> dict:
    lhs = multiply(alg, m.col(p), m.col(q))
    rhs = m @ alg.product(p, q)
    return {
        "pair": [p + 1, q + 1],
        "phi(e_i)phi(e_j)": [fmt(v) for v in lhs],
        "phi(e_i e_j)": [fmt(v) for v in rhs],
    }


def _realified(alg: StructureConstants) -> StructureConstants:
    """The same algebra over the reals, basis ``e_1..e_n, i e_1..i e_n``."""
    r = alg.__dict__.get("_realified")
    if r is None:
        n = alg.n
        products = {}
        for i, j, k, c in alg.nonzero:
            products[(i, j, k)] = c
            products[(i + n, j, k + n)] = c
            products[(i, j + n, k + n)] = c
            products[(i + n, j + n, k)] = -c
        r = StructureConstants(2 * n, products)
        alg.__dict__["_realified"] = r
    return r


def _check_exact_like(alg: StructureConstants, m: Matrix) -> Verdict:
    """Exact check of a Gaussian-rational matrix through its real form.

    ``A + iB`` acts on the realified algebra as ``[[A, -B], [B, A]]``; it is an
    automorphism there exactly when ``A + iB`` is one over the complexes.
    """
    n = alg.n
    re = [[v.re if isinstance(v, GaussQ) else Q(v) for v in row] for row in m.rows]
    im = [[v.im if isinstance(v, GaussQ) else Q(0) for v in row] for row in m.rows]
    big = Matrix(
        [re[i] + [-v for v in im[i]] for i in range(n)] + [im[i] + re[i] for i in range(n)]
    )
    v = is_automorphism(_realified(alg), big)
    if v or v.reason == "singular":
        return v
    p, q = v.detail["pair"]
    return Verdict.fail("not multiplicative", mode="exact", pair=[(p - 1) % n + 1, (q - 1) % n + 1])


def is_automorphism(alg: StructureConstants, m: Matrix, tol: float = TOL) -> Verdict:
    """Brute-force check of bijectivity and ``phi(e_i)phi(e_j) = phi(e_i e_j)`` on all pairs."""
    n = alg.n
    if m.n != n:
        return Verdict.fail("dimension", expected=n, got=m.n)
    if m.is_exact:
        ints, d = scale_to_integers(m)
        flat = [v for row in ints for v in row]
        if not kernels.det_nonzero_mod(n, flat) and _bareiss_det(ints) == 0:
            return Verdict.fail("singular", mode="exact")
        entries, ptr, data = alg.kernel_table
        hit = kernels.hom_first_failure(n, entries, ptr, data, flat, d)
        if hit < 0:
            return Verdict.ok(mode="exact")
        p, q = divmod(hit, n)
        return Verdict.fail("not multiplicative", mode="exact", **_pair_detail(alg, m, p, q))
    if m.is_exact_like:
        return _check_exact_like(alg, m)
    arr = m.to_numpy()
    if not np.all(np.isfinite(arr)):
        return Verdict.fail("non-finite entries", mode="approx")
    if float_matrix_singular(arr):
        return Verdict.fail("singular", mode="approx")
    c = _dense_float(alg)
    lhs = np.einsum("ip,jq,ijk->pqk", arr, arr, c)
    rhs = np.einsum("pqr,kr->pqk", c, arr)
    bad = np.abs(lhs - rhs) > tol * np.maximum(1.0, np.abs(rhs))
    if not bad.any():
        return Verdict.ok(mode="approx", max_defect=float(np.abs(lhs - rhs).max(initial=0.0)))
    p, q, _ = np.argwhere(bad)[0]
    return Verdict.fail("not multiplicative", mode="approx", **_pair_detail(alg, m, int(p), int(q)))


# ---------------------------------------------------------------------------
# inverse of the parameterization


def _sqrt_a1_from(m: Matrix, a1, n: int):
    """Branch of ``sqrt(a1)`` consistent with the ``(n, n)`` entry of a mu12 matrix."""
    corner = m[n - 1, n - 1]
    if n % 2 == 0:
        # corner = s * a1**((n-2)/2)
        return corner / a1 ** ((n - 2) // 2)
    # corner = a1**((n-1)/2) whatever the branch: take the principal root
    roots = nth_roots(a1, 2)
    if roots.exact is not None:
        return roots.exact
    return roots.approx[0]


def recover_params(family: AlgebraFamily, m: Matrix, tol: float = TOL) -> AutoParams:
    """Parameters ``p`` with ``build_automorphism(p) == m``; raises :class:`NotInFamilyError`."""
    n, tag = family.n, family.tag
    if m.n != n:
        raise NotInFamilyError(f"matrix is {m.n}x{m.n}, family has n={n}")
    a = m.col(0)
    a1 = a[0]
    if is_zero(a1):
        raise NotInFamilyError("a_1 = 0: first column cannot come from an automorphism", (1, 1))
    extra = {}
    if tag.filiform:
        extra["b_nm1"] = m[n - 2, n - 1]
    if tag is Family.MU11:
        extra["b_n"] = m[n - 1, n - 1]
    elif tag is Family.MU12:
        s = _sqrt_a1_from(m, a1, n)
        if not is_exact(s) and m.is_exact:
            a = tuple(to_complex(v) for v in a)
            extra = {k: to_complex(v) for k, v in extra.items()}
        extra["sqrt_a1"] = s
    try:
        p = AutoParams(family, tuple(a), **extra)
    except ParamError as exc:
        pos = (1, 1) if tag is Family.MU14 else (n, n)
        raise NotInFamilyError(f"no parameters reproduce this matrix: {exc}", pos) from exc
    rebuilt = build_automorphism(p)
    diff = rebuilt.first_difference(m, tol)
    if diff is not None:
        i, j = diff
        raise NotInFamilyError(
            f"entry ({i}, {j}) is {m[i - 1, j - 1]}, the {tag.value} form requires "
            f"{rebuilt[i - 1, j - 1]}",
            diff,
        )
    return p


# ---------------------------------------------------------------------------
# sampling


def small_rational(rng: random.Random, nonzero: bool = False, zero_rate: float = 0.2):
    if not nonzero and rng.random() < zero_rate:
        return Q(0)
    while True:
        v = Q(rng.randint(-6, 6)) / rng.choice((1, 1, 2, 3, 4))
        if v != 0:
            return v


def random_automorphism(family, n: int | None = None, seed: int = 0) -> AutoParams:
    """Seeded random parameters honoring the family's constraints (exact)."""
    if not isinstance(family, AlgebraFamily):
        family = AlgebraFamily(Family.parse(family), n)
    tag, n = family.tag, family.n
    rng = random.Random(f"aut:{tag.value}:{n}:{seed}")
    a = [small_rational(rng, nonzero=True)] + [small_rational(rng) for _ in range(n - 1)]
    extra = {}
    if tag.filiform:
        extra["b_nm1"] = small_rational(rng)
    if tag is Family.MU11:
        extra["b_n"] = small_rational(rng, nonzero=True)
    elif tag is Family.MU12:
        s = small_rational(rng, nonzero=True)
        if n % 2 == 1:
            # both branches give the same matrix for odd n; keep the positive one
            s = abs(s)
        extra["sqrt_a1"] = s
        a[0] = s * s
    elif tag is Family.MU14:
        a[0] = Q(1)
    return AutoParams(family, tuple(a), **extra)


def automorphism_group_sample(family: AlgebraFamily, count: int, seed: int = 0):
    """``count`` seeded parameter sets and their matrices."""
    for k in range(count):
        p = random_automorphism(family, seed=seed * 100_003 + k)
        yield p, build_automorphism(p)


def family_algebra(family: AlgebraFamily) -> StructureConstants:
    return _family_algebra(family.tag, family.n)


@lru_cache(maxsize=None)
def _family_algebra(tag: Family, n: int) -> StructureConstants:
    return make_algebra(AlgebraFamily(tag, n))
