"""2-local automorphisms, represented by finitely many sampled values.

An automorphism of these algebras is fixed by its value at ``e_1`` (and at
``e_n`` for the filiform families), so a 2-local map is reconstructed from
those points and must agree with that one matrix everywhere else.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from gmpy2 import mpq

from .algebra import AlgebraFamily, Family
from .automorphisms import (
    AutoParams,
    ParamError,
    build_automorphism,
    last_column,
    random_automorphism,
)
from .linalg import DimensionError, Matrix, common_denominator, mat_vec, scale_to_integers
from .local import as_family, sample_vectors
from .scalars import (
    Q,
    TOL,
    close,
    fmt,
    is_exact,
    is_exact_like,
    is_zero,
    magnitude,
    nth_roots,
    parse,
    to_complex,
)
from .verdict import Verdict


_MPQ = type(mpq(0))


class PointMapError(ValueError):
    """Malformed point map (dimensions, missing basis points, bad JSON)."""


class InconsistentPointMapError(ValueError):
    """No automorphism reproduces the values at ``e_1`` and ``e_n``."""

    def __init__(self, message: str, **detail):
        super().__init__(message)
        self.detail = detail


def basis_vector(n: int, k: int) -> tuple:
    """``e_k`` (1-based) as an exact tuple."""
    return tuple(Q(1) if i == k - 1 else Q(0) for i in range(n))


def _vector(values, n: int) -> tuple:
    out = tuple(values)
    if {type(v) for v in out} - {_MPQ}:
        out = tuple(v if is_exact_like(v) else to_complex(v) for v in out)
    if len(out) != n:
        raise PointMapError(f"vector of length {len(out)} in dimension {n}")
    return out


@dataclass(frozen=True)
class PointMap:
    """Finite sample ``x -> Delta(x)`` of a possibly nonlinear map."""

    family: AlgebraFamily
    samples: tuple

    def __post_init__(self):
        n = self.family.n
        pairs = tuple((_vector(x, n), _vector(fx, n)) for x, fx in self.samples)
        object.__setattr__(self, "samples", pairs)
        seen = {}
        for i, (x, fx) in enumerate(pairs):
            if x in seen and pairs[seen[x]][1] != fx:
                raise PointMapError(f"two different images for x = {[fmt(t) for t in x]}")
            seen.setdefault(x, i)
        object.__setattr__(self, "_where", seen)
        types = {type(v) for x, fx in pairs for v in (*x, *fx)}
        exact = types <= {_MPQ} or all(is_exact_like(v) for x, fx in pairs for v in (*x, *fx))
        object.__setattr__(self, "_exact_like", exact)
        required = [1, n] if self.family.tag.filiform else [1]
        for k in required:
            if self.lookup(basis_vector(n, k)) is None:
                raise PointMapError(f"point map must contain e_{k}")

    @property
    def n(self) -> int:
        return self.family.n

    @property
    def is_exact_like(self) -> bool:
        return self._exact_like

    def lookup(self, x):
        """Image of the sample equal to ``x``, or ``None``."""
        i = self._where.get(tuple(x))
        return None if i is None else self.samples[i][1]

    def index(self, x) -> int:
        i = self._where.get(tuple(x))
        if i is None:
            raise KeyError("x is not a sample point")
        return i

    def with_image(self, x, fx) -> "PointMap":
        """Copy with ``Delta(x)`` replaced (or added)."""
        x = _vector(x, self.n)
        out = [(y, fy) for y, fy in self.samples if y != x]
        out.append((x, _vector(fx, self.n)))
        return PointMap(self.family, tuple(out))

    @classmethod
    def from_matrix(cls, family: AlgebraFamily, m: Matrix, points) -> "PointMap":
        """Samples of the linear map ``m`` at ``points`` plus the required basis vectors."""
        n = family.n
        pts = [basis_vector(n, 1)] + ([basis_vector(n, n)] if family.tag.filiform else [])
        for x in points:
            x = _vector(x, n)
            if x not in pts:
                pts.append(x)
        return cls(family, tuple((x, mat_vec(m, x)) for x in pts))

    def to_json(self) -> dict:
        return {
            "family": self.family.tag.value,
            "n": self.n,
            "samples": [
                {"x": [fmt(v) for v in x], "fx": [fmt(v) for v in fx]} for x, fx in self.samples
            ],
        }

    @classmethod
    def from_json(cls, obj) -> "PointMap":
        try:
            family = AlgebraFamily(Family.parse(obj["family"]), obj["n"])
            samples = tuple(
                (tuple(parse(v) for v in s["x"]), tuple(parse(v) for v in s["fx"]))
                for s in obj["samples"]
            )
        except (KeyError, TypeError) as exc:
            raise PointMapError(f"malformed point map JSON: {exc}") from exc
        return cls(family, samples)


def _images(a: Matrix, xs) -> list[tuple]:
    """``a @ x`` for every ``x`` in ``xs`` (one integer product when exact)."""
    if not (a.is_exact and all(is_exact(v) for x in xs for v in x)):
        return [mat_vec(a, x) for x in xs]
    ints, d = scale_to_integers(a)
    scales, cols = [], []
    for x in xs:
        dx = common_denominator(x)
        scales.append(dx)
        cols.append([int(v.numerator) * (dx // int(v.denominator)) for v in x])
    prod = np.array(ints, dtype=object).dot(np.array(cols, dtype=object).T)
    n = a.n
    return [
        tuple(mpq(int(prod[i, j]), d * scales[j]) for i in range(n)) for j in range(len(xs))
    ]


def _first_mismatch(u, v, exact: bool, tol: float):
    for k, (a, b) in enumerate(zip(u, v)):
        if (a != b) if exact else not close(a, b, tol):
            return k
    return None


def _mu12_sqrt(a1, corner, n: int):
    """Branch ``s`` of ``sqrt(a1)`` read from ``Delta(e_n)_n``."""
    if n % 2 == 0:
        # corner = s * a1**((n-2)/2)
        return corner / a1 ** ((n - 2) // 2)
    # corner = a1**((n-1)/2) on either branch; the branch is immaterial
    roots = nth_roots(a1, 2)
    if roots.exact is not None:
        return roots.exact
    return roots.approx[0]


def recover_global(family, pm: PointMap, tol: float = TOL) -> Matrix:
    """The automorphism determined by ``Delta(e_1)`` (and ``Delta(e_n)``)."""
    family = as_family(family, pm.n)
    if family != pm.family:
        raise DimensionError(f"point map is for {pm.family.tag.value} n={pm.n}")
    tag, n = family.tag, family.n
    exact = pm.is_exact_like
    a = pm.lookup(basis_vector(n, 1))
    if not exact:
        a = tuple(to_complex(v) for v in a)
    if is_zero(a[0], tol):
        raise InconsistentPointMapError("Delta(e_1) has first coordinate 0, so a_1 = 0", point=1)
    extra = {}
    if tag.filiform:
        last = pm.lookup(basis_vector(n, n))
        if not exact:
            last = tuple(to_complex(v) for v in last)
        extra["b_nm1"] = last[n - 2]
        if tag is Family.MU11:
            extra["b_n"] = last[n - 1]
        elif tag is Family.MU12:
            s = _mu12_sqrt(a[0], last[n - 1], n)
            if not is_exact_like(s) and exact:
                exact = False
                a = tuple(to_complex(v) for v in a)
                last = tuple(to_complex(v) for v in last)
                extra = {k: to_complex(v) for k, v in extra.items()}
            extra["sqrt_a1"] = s
    try:
        params = AutoParams(family, tuple(a), **extra)
    except ParamError as exc:
        raise InconsistentPointMapError(
            f"Delta(e_1), Delta(e_n) fit no {tag.value} automorphism: {exc}", point=1
        ) from exc
    if tag.filiform:
        want = last_column(params)
        k = _first_mismatch(last, want, exact, tol)
        if k is not None:
            raise InconsistentPointMapError(
                f"Delta(e_{n}) has coordinate {k + 1} equal to {fmt(last[k])}, "
                f"but the automorphism with these a's needs {fmt(want[k])}",
                point=n,
                coordinate=k + 1,
            )
    return build_automorphism(params)


def verify_2local(family, pm: PointMap, tol: float = TOL) -> Verdict:
    """Pass iff every sample agrees with the reconstructed automorphism."""
    family = as_family(family, pm.n)
    try:
        a = recover_global(family, pm, tol)
    except InconsistentPointMapError as exc:
        return Verdict.fail(str(exc), **exc.detail)
    exact = pm.is_exact_like and a.is_exact_like
    mode = "exact" if exact else "approx"
    images = _images(a, [x for x, _ in pm.samples])
    for i, ((x, fx), ax) in enumerate(zip(pm.samples, images)):
        k = _first_mismatch(fx, ax, exact, tol)
        if k is not None:
            return Verdict.fail(
                f"sample {i} disagrees with the reconstructed automorphism",
                sample=i,
                x=[fmt(v) for v in x],
                fx=[fmt(v) for v in fx],
                expected=[fmt(v) for v in ax],
                coordinate=k + 1,
                mode=mode,
            )
    return Verdict.ok(mode=mode, samples=len(pm.samples), matrix=a.to_json())


def pair_witness_check(family, pm: PointMap, x, y, tol: float = TOL) -> Verdict:
    """Does the reconstructed automorphism match ``Delta`` at both ``x`` and ``y``?"""
    family = as_family(family, pm.n)
    try:
        a = recover_global(family, pm, tol)
    except InconsistentPointMapError as exc:
        return Verdict.fail(str(exc), **exc.detail)
    exact = pm.is_exact_like and a.is_exact_like
    for label, pt in (("x", x), ("y", y)):
        fx = pm.lookup(pt)
        if fx is None:
            return Verdict.fail(f"{label} is not a sample point", point=[fmt(v) for v in pt])
        ax = mat_vec(a, tuple(pt))
        k = _first_mismatch(fx, ax, exact, tol)
        if k is not None:
            return Verdict.fail(
                f"no single automorphism agrees at {label}",
                point=[fmt(v) for v in pt],
                coordinate=k + 1,
                defect=magnitude(to_complex(fx[k]) - to_complex(ax[k])),
            )
    return Verdict.ok(mode="exact" if exact else "approx")


def random_point_map(family, n: int | None = None, seed: int = 0, samples: int = 20):
    """``(params, PointMap)``: a seeded automorphism at ``e_1``, ``e_n`` and
    ``max(samples, n)`` further distinct points.

    The points cover every leading position, so they span the space and any
    change of the reconstructed matrix is visible at some sample.
    """
    family = as_family(family, n)
    params = random_automorphism(family, seed=seed)
    m = build_automorphism(params)
    n = family.n
    basis = {basis_vector(n, 1), basis_vector(n, n)}
    want = max(samples, n)
    points: list[tuple] = []
    draw = want
    while len(points) < want:
        # duplicates and basis points do not count as extra samples
        points = list(dict.fromkeys(
            x for x in sample_vectors(n, draw, seed=seed + 7919) if x not in basis
        ))[:want]
        draw += want
    return params, PointMap.from_matrix(family, m, points)


def perturb(pm: PointMap, index: int, delta) -> PointMap:
    """Copy of ``pm`` with ``delta`` added to the image of sample ``index``."""
    x, fx = pm.samples[index]
    return pm.with_image(x, tuple(u + v for u, v in zip(fx, delta)))
