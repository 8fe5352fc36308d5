"""Structure constants of the null-filiform and filiform associative algebras.

Basis vectors are ``e_1 .. e_n``; in code index ``i`` stands for ``e_{i+1}``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from math import lcm
from typing import NamedTuple, Sequence

from gmpy2 import mpq

from .linalg import DimensionError, rref_basis
from .scalars import Q, fmt, is_exact, to_complex


class Family(str, enum.Enum):
    MU0 = "mu0"
    MU11 = "mu11"
    MU12 = "mu12"
    MU13 = "mu13"
    MU14 = "mu14"

    @property
    def min_dim(self) -> int:
        return 2 if self is Family.MU0 else 4

    @property
    def filiform(self) -> bool:
        return self is not Family.MU0

    @classmethod
    def parse(cls, name) -> "Family":
        if isinstance(name, Family):
            return name
        key = str(name).strip().lower().replace(",", "").replace("_", "")
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown algebra family {name!r}") from None


FAMILIES = tuple(Family)


class FamilyDimensionError(ValueError):
    pass


@dataclass(frozen=True)
class AlgebraFamily:
    tag: Family
    n: int

    def __post_init__(self):
        object.__setattr__(self, "tag", Family.parse(self.tag))
        if not isinstance(self.n, int) or self.n < self.tag.min_dim:
            raise FamilyDimensionError(
                f"{self.tag.value} needs n >= {self.tag.min_dim}, got {self.n}"
            )

    def to_json(self) -> dict:
        return {"family": self.tag.value, "n": self.n}


class NotNilpotentError(ArithmeticError):
    def __init__(self, dims):
        super().__init__(f"algebra is not nilpotent: dims stall at {list(dims)}")
        self.dims = tuple(dims)


class StructureConstants:
    """Dense table ``c[i][j][k]`` with ``e_i e_j = sum_k c[i][j][k] e_k``."""

    def __init__(self, n: int, products: dict | None = None, family: AlgebraFamily | None = None):
        if n < 1:
            raise DimensionError("dimension must be positive")
        self.n = n
        self.family = family
        zero = Q(0)
        c = [[[zero] * n for _ in range(n)] for _ in range(n)]
        for (i, j, k), v in (products or {}).items():
            if not (0 <= i < n and 0 <= j < n and 0 <= k < n):
                raise DimensionError(f"product index {(i + 1, j + 1, k + 1)} outside 1..{n}")
            c[i][j][k] = Q(v)
        self.c = tuple(tuple(tuple(row) for row in plane) for plane in c)

    def __eq__(self, other):
        return isinstance(other, StructureConstants) and self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def __repr__(self):
        tag = self.family.tag.value if self.family else "custom"
        return f"StructureConstants({tag}, n={self.n}, nnz={len(self.nonzero)})"

    @cached_property
    def nonzero(self) -> tuple[tuple[int, int, int, mpq], ...]:
        n = self.n
        return tuple(
            (i, j, k, self.c[i][j][k])
            for i in range(n)
            for j in range(n)
            for k in range(n)
            if self.c[i][j][k] != 0
        )

    @cached_property
    def kernel_table(self):
        """Integer form used by the compiled kernels: ``(entries, ptr, data)``."""
        n = self.n
        t = 1
        for *_, v in self.nonzero:
            t = lcm(t, int(v.denominator))
        entries = []
        by_pair: list[list[int]] = [[] for _ in range(n * n)]
        for i, j, k, v in self.nonzero:
            c = int(v * t)
            entries.extend((i, j, k, c))
            by_pair[i * n + j].extend((k, c))
        ptr = [0]
        data: list[int] = []
        for chunk in by_pair:
            data.extend(chunk)
            ptr.append(len(data) // 2)
        return entries, ptr, data

    def product(self, i: int, j: int) -> tuple:
        """Coordinates of ``e_{i+1} e_{j+1}``."""
        return self.c[i][j]

    def to_json(self) -> dict:
        if self.family is not None:
            return self.family.to_json()
        return {
            "custom": True,
            "n": self.n,
            "table": [[i + 1, j + 1, k + 1, fmt(v)] for i, j, k, v in self.nonzero],
        }


def make_algebra(family: AlgebraFamily | Family | str, n: int | None = None) -> StructureConstants:
    """Multiplication table of one of the five families in the canonical basis."""
    if not isinstance(family, AlgebraFamily):
        family = AlgebraFamily(Family.parse(family), n)
    tag, n = family.tag, family.n
    top = n if tag is Family.MU0 else n - 1
    products = {}
    for i in range(1, top):
        for j in range(1, top + 1 - i):
            products[(i - 1, j - 1, i + j - 1)] = 1
    last, below = n - 1, n - 2
    if tag in (Family.MU12, Family.MU14):
        products[(last, last, below)] = 1
    if tag in (Family.MU13, Family.MU14):
        products[(0, last, below)] = 1
    return StructureConstants(n, products, family)


def custom_algebra(n: int, table: Sequence) -> StructureConstants:
    """Algebra from ``[[i, j, k, "p/q"], ...]`` entries (1-based indices)."""
    products = {}
    for row in table:
        if len(row) != 4:
            raise ValueError(f"table rows are [i, j, k, value], got {row!r}")
        i, j, k, v = row
        if not all(isinstance(t, int) and not isinstance(t, bool) for t in (i, j, k)):
            raise ValueError(f"table indices must be integers, got {row!r}")
        if not all(1 <= t <= n for t in (i, j, k)):
            raise DimensionError(f"table index outside 1..{n}: {row!r}")
        products[(i - 1, j - 1, k - 1)] = Q(v)
    return StructureConstants(n, products)


def zero_algebra(n: int) -> StructureConstants:
    return StructureConstants(n)


def algebra_from_json(obj: dict) -> StructureConstants:
    if not isinstance(obj, dict) or "n" not in obj:
        raise ValueError("algebra JSON needs 'n' and either 'family' or 'custom'")
    n = obj["n"]
    if not isinstance(n, int) or isinstance(n, bool):
        raise ValueError("'n' must be an integer")
    if obj.get("custom"):
        return custom_algebra(n, obj.get("table", []))
    if "family" not in obj:
        raise ValueError("algebra JSON needs 'family' or 'custom': true")
    return make_algebra(AlgebraFamily(Family.parse(obj["family"]), n))


def multiply(alg: StructureConstants, x: Sequence, y: Sequence) -> tuple:
    """Bilinear product ``z_k = sum_{i,j} x_i y_j c[i][j][k]``."""
    n = alg.n
    if len(x) != n or len(y) != n:
        raise DimensionError(f"vectors must have length {n}")
    if all(is_exact(v) for v in x) and all(is_exact(v) for v in y):
        x = [Q(v) for v in x]
        y = [Q(v) for v in y]
        z = [Q(0)] * n
        table = alg.nonzero
    else:
        x = [to_complex(v) for v in x]
        y = [to_complex(v) for v in y]
        z = [0j] * n
        table = [(i, j, k, float(c)) for i, j, k, c in alg.nonzero]
    for i, j, k, c in table:
        xi, yj = x[i], y[j]
        if xi and yj:
            z[k] += xi * yj * c
    return tuple(z)


def associativity_failure(alg: StructureConstants):
    """First basis triple (1-based) with ``(e_i e_j) e_k != e_i (e_j e_k)``, else ``None``."""
    n = alg.n
    basis = [tuple(Q(int(i == j)) for j in range(n)) for i in range(n)]
    for i in range(n):
        for j in range(n):
            ij = alg.product(i, j)
            for k in range(n):
                left = multiply(alg, ij, basis[k])
                right = multiply(alg, basis[i], alg.product(j, k))
                if left != right:
                    return (i + 1, j + 1, k + 1)
    return None


def is_associative(alg: StructureConstants) -> bool:
    return associativity_failure(alg) is None


class PowerProfile(NamedTuple):
    dims: tuple[int, ...]
    nilindex: int


def _span_product(alg: StructureConstants, left, right) -> list[tuple]:
    return [multiply(alg, u, v) for u in left for v in right]


def power_bases(alg: StructureConstants) -> list[list[tuple]]:
    """RREF bases of ``A^1, A^2, ...`` ending with the first zero space.

    ``A^{i+1}`` is the span of all products ``A^k A^{i-k+1}``.
    Raises :class:`NotNilpotentError` if ``A^{n+1} != 0``.
    """
    n = alg.n
    levels = [rref_basis(tuple(Q(int(i == j)) for j in range(n)) for i in range(n))]
    while levels[-1]:
        i = len(levels)  # computing A^{i+1}
        if i > n:
            raise NotNilpotentError(len(b) for b in levels)
        gens = []
        for k in range(1, i + 1):
            gens.extend(_span_product(alg, levels[k - 1], levels[i - k]))
        levels.append(rref_basis(gens))
    return levels


def power_profile(alg: StructureConstants) -> PowerProfile:
    levels = power_bases(alg)
    dims = tuple(len(b) for b in levels)
    return PowerProfile(dims, len(dims))


NULL_FILIFORM = "null-filiform"
FILIFORM = "filiform"
NEITHER = "neither"


def classify_profile(alg: StructureConstants) -> str:
    try:
        dims = power_profile(alg).dims
    except NotNilpotentError:
        return NEITHER
    n = alg.n

    def dim(i):
        return dims[i - 1] if i <= len(dims) else 0

    if all(dim(i) == n + 1 - i for i in range(1, n + 2)):
        return NULL_FILIFORM
    if all(dim(i) == n - i for i in range(2, n + 1)):
        return FILIFORM
    return NEITHER
