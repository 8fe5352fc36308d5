"""Dense vectors and square matrices over exact or approximate scalars.

Matrices are stored row-major and are immutable; column ``j`` is the image of
the basis vector ``e_{j+1}`` (indices are 0-based in code, 1-based in
messages).
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from operator import mul
from typing import Iterable, Sequence

import numpy as np

from .scalars import GaussQ, Q, TOL, close, fmt, is_exact, is_exact_like, parse, to_complex

Vector = tuple


class DimensionError(ValueError):
    pass


class SingularMatrixError(ArithmeticError):
    pass


_RATIONAL_TYPES = frozenset({type(Q(0)), int, Fraction})


class Matrix:
    __slots__ = ("_rows", "_n", "_exact", "_exact_like")

    def __init__(self, rows: Iterable[Iterable]):
        rows = tuple(tuple(r) for r in rows)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise DimensionError("matrix must be square")
        self._rows = rows
        self._n = n
        types = {type(v) for r in rows for v in r}
        if types <= _RATIONAL_TYPES:
            self._exact = self._exact_like = True
        else:
            self._exact = all(is_exact(v) for r in rows for v in r)
            self._exact_like = self._exact or all(is_exact_like(v) for r in rows for v in r)

    # construction -------------------------------------------------------

    @classmethod
    def identity(cls, n: int, exact: bool = True) -> "Matrix":
        one, zero = (Q(1), Q(0)) if exact else (1 + 0j, 0j)
        return cls([[one if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def diag(cls, values: Sequence) -> "Matrix":
        vals = [Q(v) if is_exact(v) else to_complex(v) for v in values]
        zero = Q(0) if all(is_exact(v) for v in vals) else 0j
        n = len(vals)
        return cls([[vals[i] if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence]) -> "Matrix":
        n = len(columns)
        return cls([[columns[j][i] for j in range(n)] for i in range(n)])

    @classmethod
    def exact(cls, rows) -> "Matrix":
        return cls([[Q(v) for v in r] for r in rows])

    # access -------------------------------------------------------------

    @property
    def n(self) -> int:
        return self._n

    @property
    def rows(self) -> tuple:
        return self._rows

    @property
    def is_exact(self) -> bool:
        """All entries rational."""
        return self._exact

    @property
    def is_exact_like(self) -> bool:
        """All entries rational or Gaussian rational."""
        return self._exact_like

    def __getitem__(self, ij):
        i, j = ij
        return self._rows[i][j]

    def col(self, j: int) -> Vector:
        return tuple(r[j] for r in self._rows)

    def columns(self) -> list[Vector]:
        return [self.col(j) for j in range(self._n)]

    def with_entry(self, i: int, j: int, value) -> "Matrix":
        rows = [list(r) for r in self._rows]
        rows[i][j] = value
        return Matrix(rows)

    def approx(self) -> "Matrix":
        return Matrix([[to_complex(v) for v in r] for r in self._rows])

    def to_numpy(self) -> np.ndarray:
        return np.array([[to_complex(v) for v in r] for r in self._rows], dtype=complex)

    def transpose(self) -> "Matrix":
        return Matrix(zip(*self._rows))

    # algebra ------------------------------------------------------------

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            return mat_mul(self, other)
        return mat_vec(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self._rows == other._rows

    def __hash__(self):
        return hash(self._rows)

    def close_to(self, other: "Matrix", tol: float = TOL) -> bool:
        if self._n != other._n:
            return False
        return all(
            close(a, b, tol) for ra, rb in zip(self._rows, other._rows) for a, b in zip(ra, rb)
        )

    def first_difference(self, other: "Matrix", tol: float = TOL):
        """1-based ``(row, col)`` of the first mismatching entry, or ``None``."""
        for i, (ra, rb) in enumerate(zip(self._rows, other._rows)):
            for j, (a, b) in enumerate(zip(ra, rb)):
                if not close(a, b, tol):
                    return (i + 1, j + 1)
        return None

    def __repr__(self):
        body = "; ".join(" ".join(str(v) for v in r) for r in self._rows)
        return f"Matrix([{body}])"

    # serialization ------------------------------------------------------

    def to_json(self) -> list:
        return [[fmt(v) for v in r] for r in self._rows]

    @classmethod
    def from_json(cls, rows) -> "Matrix":
        if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
            raise ValueError("matrix must be a list of rows")
        return cls([[parse(v) for v in r] for r in rows])


def mat_vec(m: Matrix, v: Sequence) -> Vector:
    if len(v) != m.n:
        raise DimensionError(f"vector of length {len(v)} against a {m.n}x{m.n} matrix")
    if m.is_exact and all(is_exact(x) for x in v):
        rows, vec, zero = m.rows, [Q(x) for x in v], Q(0)
    elif m.is_exact_like and all(is_exact_like(x) for x in v):
        rows, zero = m.rows, Q(0)
        vec = [x if isinstance(x, GaussQ) else Q(x) for x in v]
    else:
        rows, vec, zero = m.approx().rows, [to_complex(x) for x in v], 0j
    return tuple(sum(map(mul, row, vec), zero) for row in rows)


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    if a.n != b.n:
        raise DimensionError("matrix sizes differ")
    if not (a.is_exact_like and b.is_exact_like):
        a, b = a.approx(), b.approx()
    return Matrix.from_columns([mat_vec(a, b.col(j)) for j in range(b.n)])


def common_denominator(values: Iterable) -> int:
    dens = {int(v.denominator) for v in values}
    dens.discard(1)
    return lcm(*dens) if dens else 1


def scale_to_integers(m: Matrix) -> tuple[list[list[int]], int]:
    """Return ``(N, D)`` with integer ``N`` and ``m == N / D``."""
    if not m.is_exact:
        raise TypeError("integer scaling needs an exact matrix")
    d = common_denominator(v for r in m.rows for v in r)
    out = []
    for r in m.rows:
        row = []
        for v in r:
            row.append(int(v.numerator) * (d // int(v.denominator)))
        out.append(row)
    return out, d


def _bareiss_det(a: list[list[int]]) -> int:
    a = [row[:] for row in a]
    n = len(a)
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for p in range(k + 1, n):
                if a[p][k] != 0:
                    a[k], a[p] = a[p], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (akk * row_i[j] - aik * row_k[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1] if n else 1


def det(m: Matrix):
    if m.is_exact:
        ints, d = scale_to_integers(m)
        return Q(_bareiss_det(ints)) / Q(d) ** m.n
    return complex(np.linalg.det(m.to_numpy()))


def is_invertible(m: Matrix) -> bool:
    if m.is_exact_like:
        return not exact_like_singular(m)
    try:
        invert(m)
    except SingularMatrixError:
        return False
    return True


def _fraction_free_inverse(ints: list[list[int]]) -> tuple[list[list[int]], int]:
    """Fraction-free Gauss-Jordan on ``[N | I]``: returns ``(R, d)`` with ``N R = d I``."""
    n = len(ints)
    a = [row[:] + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(ints)]
    prev = 1
    for k in range(n):
        if a[k][k] == 0:
            for p in range(k + 1, n):
                if a[p][k] != 0:
                    a[k], a[p] = a[p], a[k]
                    break
            else:
                raise SingularMatrixError("matrix is singular")
        akk = a[k][k]
        row_k = a[k]
        for i in range(n):
            if i == k:
                continue
            row_i = a[i]
            aik = row_i[k]
            for j in range(2 * n):
                if j == k:
                    continue
                num = akk * row_i[j] - aik * row_k[j]
                q, r = divmod(num, prev)
                assert r == 0, "fraction-free division must be exact"
                row_i[j] = q
            row_i[k] = 0
        prev = akk
    d = a[0][0]
    return [row[n:] for row in a], d


def _gauss_div(a: tuple[int, int], b: tuple[int, int]) -> tuple[int, int]:
    """Exact quotient in the Gaussian integers (asserts divisibility)."""
    (x, y), (u, v) = a, b
    norm = u * u + v * v
    re, r1 = divmod(x * u + y * v, norm)
    im, r2 = divmod(y * u - x * v, norm)
    assert r1 == 0 and r2 == 0, "Bareiss division must be exact"
    return re, im


def _gauss_int_singular(g: list[list[tuple[int, int]]]) -> bool:
    """Fraction-free elimination over the Gaussian integers (pairs ``(re, im)``)."""
    g = [row[:] for row in g]
    n = len(g)
    prev = (1, 0)
    for k in range(n):
        if g[k][k] == (0, 0):
            for p in range(k + 1, n):
                if g[p][k] != (0, 0):
                    g[k], g[p] = g[p], g[k]
                    break
            else:
                return True
        akr, aki = g[k][k]
        row_k = g[k]
        for i in range(k + 1, n):
            row_i = g[i]
            bkr, bki = row_i[k]
            for j in range(k + 1, n):
                xr, xi = row_i[j]
                yr, yi = row_k[j]
                num = (
                    akr * xr - aki * xi - (bkr * yr - bki * yi),
                    akr * xi + aki * xr - (bkr * yi + bki * yr),
                )
                row_i[j] = _gauss_div(num, prev)
            row_i[k] = (0, 0)
        prev = (akr, aki)
    return False


def _gauss_parts(v) -> tuple:
    if isinstance(v, GaussQ):
        return v.re, v.im
    return Q(v), Q(0)


def exact_like_singular(m: Matrix) -> bool:
    """Exact singularity test for rational or Gaussian-rational matrices."""
    if m.is_exact:
        ints, _ = scale_to_integers(m)
        return _bareiss_det(ints) == 0
    parts = [[_gauss_parts(v) for v in row] for row in m.rows]
    den = common_denominator(f for row in parts for pair in row for f in pair)
    return _gauss_int_singular([[(int(re * den), int(im * den)) for re, im in row] for row in parts])


def float_matrix_singular(arr: np.ndarray) -> bool:
    """Whether the floating-point entries, read as exact binary rationals, are singular.

    Every finite double is a dyadic rational, so the complex entries are
    Gaussian rationals and a fraction-free pass decides singularity without
    rounding.  Non-finite input counts as singular.
    """
    a = np.asarray(arr, dtype=complex)
    if not np.all(np.isfinite(a)):
        return True
    parts = [[(Fraction(float(z.real)), Fraction(float(z.imag))) for z in row] for row in a]
    den = lcm(*(f.denominator for row in parts for pair in row for f in pair)) if len(a) else 1
    return _gauss_int_singular([[(int(re * den), int(im * den)) for re, im in row] for row in parts])


def invert(m: Matrix) -> Matrix:
    """Exact inverse (fraction-free elimination) or partial-pivot LU inverse."""
    if m.is_exact:
        ints, d = scale_to_integers(m)
        r, det_n = _fraction_free_inverse(ints)
        scale = Q(d) / Q(det_n)
        return Matrix([[Q(v) * scale for v in row] for row in r])
    arr = m.to_numpy()
    if float_matrix_singular(arr):
        raise SingularMatrixError("matrix is singular")
    try:
        inv = np.linalg.inv(arr)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(str(exc)) from exc
    if not np.all(np.isfinite(inv)):
        raise SingularMatrixError("matrix is numerically singular")
    return Matrix([[complex(v) for v in row] for row in inv])


def rref_basis(vectors: Iterable[Sequence]) -> list[tuple]:
    """Exact reduced row-echelon basis of the span of ``vectors``."""
    rows = [[Q(v) for v in vec] for vec in vectors]
    rows = [r for r in rows if any(v != 0 for v in r)]
    if not rows:
        return []
    width = len(rows[0])
    basis: list[list] = []
    pivots: list[int] = []
    for r in rows:
        r = r[:]
        for b, p in zip(basis, pivots):
            if r[p] != 0:
                f = r[p]
                r = [x - f * y for x, y in zip(r, b)]
        lead = next((j for j in range(width) if r[j] != 0), None)
        if lead is None:
            continue
        inv = 1 / r[lead]
        r = [x * inv for x in r]
        for idx, b in enumerate(basis):
            if b[lead] != 0:
                f = b[lead]
                basis[idx] = [x - f * y for x, y in zip(b, r)]
        basis.append(r)
        pivots.append(lead)
    order = sorted(range(len(basis)), key=lambda i: pivots[i])
    return [tuple(basis[i]) for i in order]
