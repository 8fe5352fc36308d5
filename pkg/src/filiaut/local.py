"""Local automorphisms: shape characterization, point witnesses, counterexamples.

A linear map ``Phi`` is a local automorphism when every ``x`` has an
automorphism ``phi_x`` with ``Phi(x) = phi_x(x)``.  :func:`solve_witness`
builds ``phi_x`` by forward substitution, branching on the first nonzero
coordinate ``m`` of ``x``.

Two shape variants are provided.  ``"literal"`` is the lower-triangular form as
usually displayed.  ``"derived"`` is what the witness equations actually
require; it differs for mu12, mu13 and mu14 (see :func:`local_shape`).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd

from .algebra import AlgebraFamily, Family
from .automorphisms import (
    AutoParams,
    build_automorphism,
    family_algebra,
    is_automorphism,
    small_rational,
)
from .linalg import DimensionError, Matrix, mat_vec
from .scalars import (
    GaussQ,
    Q,
    TOL,
    close,
    ROOT_BOUNDS,
    exact_root,
    fmt,
    is_exact,
    is_exact_like,
    is_zero,
    magnitude,
    nth_roots,
    to_complex,
)
from .verdict import Verdict

SHAPES = ("derived", "literal")


class WitnessError(ValueError):
    """No automorphism agrees with ``Phi`` at ``x`` (or the input is unusable)."""

    def __init__(self, reason: str, **detail):
        super().__init__(reason)
        self.reason = reason
        self.detail = detail


def as_family(family, n: int | None = None) -> AlgebraFamily:
    if isinstance(family, AlgebraFamily):
        if n is not None and n != family.n:
            raise DimensionError(f"family has n={family.n}, got n={n}")
        return family
    return AlgebraFamily(Family.parse(family), n)


# ---------------------------------------------------------------------------
# shapes


@dataclass(frozen=True)
class PowerRelation:
    """Some ``z`` has ``z**p == M[i, i]`` and ``z**q == M[j, j]`` (0-based ``i, j``)."""

    i: int
    p: int
    j: int
    q: int

    def holds(self, m: Matrix, tol: float = TOL) -> bool:
        u, v = m[self.i, self.i], m[self.j, self.j]
        g = gcd(self.p, self.q)
        if is_exact(u) and is_exact(v):
            return u ** (self.q // g) == v ** (self.p // g)
        return close(to_complex(u) ** (self.q // g), to_complex(v) ** (self.p // g), tol)

    def describe(self) -> str:
        return (
            f"exists z: z^{self.p} = b({self.i + 1},{self.i + 1}) "
            f"and z^{self.q} = b({self.j + 1},{self.j + 1})"
        )


@dataclass(frozen=True)
class LocalShape:
    family: AlgebraFamily
    variant: str
    zeros: frozenset
    fixed: dict = field(hash=False)
    nonzero: frozenset
    relations: tuple = ()

    def free_positions(self) -> list[tuple[int, int]]:
        n = self.family.n
        return [
            (i, j)
            for i in range(n)
            for j in range(n)
            if (i, j) not in self.zeros and (i, j) not in self.fixed and i != j
        ]


def local_shape(family: AlgebraFamily, variant: str = "derived") -> LocalShape:
    """Zero pattern, fixed entries and diagonal conditions of a local automorphism.

    ``"literal"``: lower triangular with nonzero diagonal; for filiform
    families the ``(n-1, n)`` entry is free, row ``n`` is zero off
    ``(n, 1)`` and ``(n, n)``, and mu14 fixes ``(n, n) = 1``.

    ``"derived"`` also frees ``(n-2, n)`` for mu12 and mu14 (automorphisms
    have ``-a_n`` terms there), fixes the whole mu14 diagonal to 1, and adds
    the power relations linking ``b(m, m)`` to ``b(n, n)`` for mu12 and mu13.
    """
    if variant not in SHAPES:
        raise ValueError(f"shape variant must be one of {SHAPES}, got {variant!r}")
    tag, n = family.tag, family.n
    derived = variant == "derived"
    free = set()
    if tag.filiform:
        free.add((n - 2, n - 1))
        if derived and tag in (Family.MU12, Family.MU14):
            free.add((n - 3, n - 1))
    zeros = {(i, j) for i in range(n) for j in range(i + 1, n)} - free
    if tag.filiform:
        zeros |= {(n - 1, j) for j in range(1, n - 1)}
    fixed = {}
    if tag is Family.MU14:
        fixed[(n - 1, n - 1)] = Q(1)
        if derived:
            fixed.update({(k, k): Q(1) for k in range(n)})
    nonzero = frozenset((k, k) for k in range(n) if (k, k) not in fixed)
    relations = []
    if derived and tag is Family.MU12:
        relations = [PowerRelation(m - 1, 2 * m, n - 1, n - 1) for m in range(2, n - 2)]
    elif derived and tag is Family.MU13:
        relations = [PowerRelation(m - 1, m, n - 1, n - 2) for m in range(2, n - 1)]
    return LocalShape(family, variant, frozenset(zeros), fixed, nonzero, tuple(relations))


def matches_local_shape(family, m: Matrix, variant: str = "derived", tol: float = TOL) -> Verdict:
    """Check ``m`` against :func:`local_shape`; failures name the first offending entry (1-based)."""
    family = as_family(family, None if isinstance(family, AlgebraFamily) else m.n)
    n = family.n
    if m.n != n:
        return Verdict.fail("dimension", expected=n, got=m.n, shape=variant)
    shape = local_shape(family, variant)
    for i, j in sorted(shape.zeros):
        if not is_zero(m[i, j], tol):
            return Verdict.fail(
                f"entry ({i + 1}, {j + 1}) must be 0",
                position=[i + 1, j + 1], value=fmt(m[i, j]), shape=variant,
            )
    for (i, j), want in sorted(shape.fixed.items()):
        if not close(m[i, j], want, tol):
            return Verdict.fail(
                f"entry ({i + 1}, {j + 1}) must be {want}",
                position=[i + 1, j + 1], value=fmt(m[i, j]), shape=variant,
            )
    for i, j in sorted(shape.nonzero):
        if is_zero(m[i, j], tol):
            return Verdict.fail(
                f"entry ({i + 1}, {j + 1}) must be nonzero",
                position=[i + 1, j + 1], value=fmt(m[i, j]), shape=variant,
            )
    for rel in shape.relations:
        if not rel.holds(m, tol):
            return Verdict.fail(
                f"diagonal relation fails: {rel.describe()}",
                position=[rel.i + 1, rel.i + 1], related=[rel.j + 1, rel.j + 1], shape=variant,
            )
    return Verdict.ok(shape=variant)


def random_local_matrix(family, n: int | None = None, seed: int = 0, variant: str = "derived") -> Matrix:
    """Seeded exact matrix conforming to the chosen shape variant."""
    family = as_family(family, n)
    tag, n = family.tag, family.n
    shape = local_shape(family, variant)
    rng = random.Random(f"local:{tag.value}:{n}:{variant}:{seed}")
    rows = [[Q(0)] * n for _ in range(n)]
    for i, j in shape.free_positions():
        rows[i][j] = small_rational(rng, zero_rate=0.3)
    for (i, j), v in shape.fixed.items():
        rows[i][j] = v
    for i, _ in sorted(shape.nonzero):
        rows[i][i] = small_rational(rng, nonzero=True)
    if shape.relations:
        z = small_rational(rng, nonzero=True)
        last = shape.relations[0]
        rows[n - 1][n - 1] = z**last.q
        for rel in shape.relations:
            # z**p works; so does -z**p when the relation's q/g exponent is even
            sign = -1 if (rel.q // gcd(rel.p, rel.q)) % 2 == 0 and rng.random() < 0.5 else 1
            rows[rel.i][rel.i] = sign * z**rel.p
    return Matrix(rows)


# ---------------------------------------------------------------------------
# witnesses


@dataclass(frozen=True)
class WitnessReport:
    x: tuple
    branch: int
    params: AutoParams
    residual: float  # max |phi_x(x) - Phi(x)| / max(1, |Phi(x)|) over coordinates
    mode: str

    @property
    def matrix(self) -> Matrix:
        return build_automorphism(self.params)

    def to_json(self) -> dict:
        return {
            "x": [fmt(v) for v in self.x],
            "branch": self.branch,
            "residual": self.residual,
            "mode": self.mode,
            "params": self.params.to_json(),
        }


def _bezout(p: int, q: int) -> tuple[int, int]:
    """``(alpha, beta)`` with ``alpha p + beta q = 1`` for coprime ``p, q``."""
    alpha = pow(p, -1, q) if q > 1 else 0
    return alpha, (1 - alpha * p) // q


def _solve_base(eqs, exact: bool, bound: int = ROOT_BOUNDS[-1]):
    """Common root ``z`` of ``z**p == u`` over ``(p, u, row)`` in ``eqs``.

    Returns ``(z, rounded)``; in exact mode an irrational root is rounded to a
    nearby exact value (see :func:`exact_root`), otherwise it is a double.
    """
    if not eqs:
        return (Q(1) if exact else 1 + 0j), False
    for p, u, row in eqs:
        if is_zero(u):
            raise WitnessError(f"row {row} needs z^{p} = 0, impossible with a_1 != 0", row=row)
    if len(eqs) == 1:
        (p, u, _), = eqs
        order, w = p, u
    else:
        (p, u, r1), (q, v, r2) = eqs
        g = gcd(p, q)
        pp, qq = p // g, q // g
        if not close(u**qq, v**pp):
            raise WitnessError(
                f"rows {r1} and {r2} need z^{p} = {fmt(u)} and z^{q} = {fmt(v)}, "
                "which have no common root",
                rows=[r1, r2],
            )
        alpha, beta = _bezout(pp, qq)
        order, w = g, u**alpha * v**beta
    if exact:
        return exact_root(w, order, bound)
    return nth_roots(w, order).approx[0], False


@lru_cache(maxsize=64)
def _cached_shape_check(family, phi, exact_like, variant, tol):
    # repeated solves against one Phi re-check the same shape
    return matches_local_shape(family, phi, variant, tol)


def solve_witness(
    family,
    phi: Matrix,
    x,
    shape: str | None = "derived",
    verify: bool = True,
    tol: float = TOL,
) -> WitnessReport:
    """Automorphism ``phi_x`` with ``phi_x(x) = Phi(x)``.

    Works in exact arithmetic when ``Phi``, ``x`` and the needed root are
    rational, otherwise in complex doubles.  Free parameters are set to 0
    (``b_n`` of mu11 to ``Phi[n, n]``).  Raises :class:`WitnessError`.
    """
    family = as_family(family, None if isinstance(family, AlgebraFamily) else phi.n)
    tag, n = family.tag, family.n
    if phi.n != n or len(x) != n:
        raise DimensionError(f"need an {n}x{n} matrix and a length-{n} vector")
    if shape is not None:
        v = _cached_shape_check(family, phi, phi.is_exact_like, shape, tol)
        if not v:
            raise WitnessError(f"shape violation: {v.reason}", **v.detail)
    fil = tag.filiform
    exact = phi.is_exact_like and all(is_exact_like(t) for t in x)
    xs = [t if isinstance(t, GaussQ) else Q(t) for t in x] if exact else [to_complex(t) for t in x]
    m = next((i + 1 for i, t in enumerate(xs) if not is_zero(t, tol)), None)
    if m is None:
        raise WitnessError("x = 0 has no branch")
    mat = phi if exact else phi.approx()
    y = mat_vec(mat, xs)

    def X(i):
        return xs[i - 1]

    def Y(i):
        return y[i - 1]

    has_n = fil and not is_zero(X(n), tol)

    # equations on the base z: a_1 = z, except mu12 where z = sqrt(a_1)
    step = 2 if tag is Family.MU12 else 1
    hard = not fil or not (
        m == n
        or (m == n - 1 and has_n)
        or (m == n - 2 and has_n and tag in (Family.MU12, Family.MU14))
    )
    eqs = []
    if hard:
        eqs.append((step * m, Y(m) / X(m), m))
    if fil and m > 1 and has_n:
        if tag is Family.MU12:
            eqs.append((n - 1, Y(n) / X(n), n))
        elif tag is Family.MU13:
            eqs.append((n - 2, Y(n) / X(n), n))
        elif tag is Family.MU14:
            eqs.append((1, Y(n) / X(n), n))

    def attempt(bound):
        if tag is Family.MU14:
            for p, u, row in eqs:
                if not close(u, Q(1), tol):
                    raise WitnessError(
                        f"row {row} needs a_1^{p} = {fmt(u)}, but a_1 = 1 for mu14", row=row
                    )
            z, rounded = (Q(1) if exact else 1 + 0j), False
        else:
            z, rounded = _solve_base(eqs, exact, bound)
        one = Q(1) if exact else 1 + 0j
        zero = one - one
        for p, u, row in eqs:
            zp = to_complex(z**p) if rounded else z**p
            if not close(zp, u, tol):
                if rounded and bound < ROOT_BOUNDS[-1]:
                    return None
                raise WitnessError(f"root check failed on row {row}", row=row)

        a = [zero] * (n + 1)  # 1-based
        a1 = z * z if tag is Family.MU12 else z
        a[1] = a1
        s = z if tag is Family.MU12 else None
        b_nm1 = zero
        bnn = mat[n - 1, n - 1]
        b_n = (bnn if not is_zero(bnn, tol) else one) if tag is Family.MU11 else None
        top = n - 1 if fil else n
        c = {j: [a1**j] for j in range(m, top + 1)}
        lead = m * a1 ** (m - 1)

        def extend_table(d):
            for j in range(m, min(d, top) + 1):
                e = d - j
                if e == 0:
                    continue
                acc = zero
                cj = c[j]
                for ell in range(1, e + 1):
                    q = a[ell + 1]
                    if q:
                        acc += ((j + 1) * ell - e) * q * cj[e - ell]
                cj.append(acc / (e * a1))

        def last_entry():
            if tag is Family.MU11:
                return b_n
            if tag is Family.MU12:
                return s ** (n - 1)
            if tag is Family.MU13:
                return a1 ** (n - 2)
            return one

        def evaluate(d):
            if fil and d == n:
                return X(1) * a[n] + X(n) * last_entry()
            acc = zero
            for j in range(m, min(d, top) + 1):
                if X(j):
                    acc += X(j) * c[j][d - j]
            if fil and d == n - 1:
                an = a[n]
                if tag is Family.MU12:
                    extra = an * an
                elif tag is Family.MU13:
                    extra = a1 * an
                elif tag is Family.MU14:
                    extra = a1 * an + an * an
                else:
                    extra = zero
                acc += X(2) * extra + X(n) * b_nm1
            if fil and d == n - 2 and tag in (Family.MU12, Family.MU14):
                acc += X(n) * -a[n] * (s ** (n - 3) if tag is Family.MU12 else one)
            return acc

        def designate(d):
            if fil and d == n:
                if not is_zero(X(1), tol):
                    return "a", n, X(1)
                if tag is Family.MU11 and has_n:
                    return "b_n", None, X(n)
                return None
            if d > m:
                return "a", d - m + 1, lead * X(m)
            if has_n and d == n - 1:
                return "b_nm1", None, X(n)
            if has_n and d == n - 2 and tag is Family.MU12:
                return "a", n, -(s ** (n - 3)) * X(n)
            if has_n and d == n - 2 and tag is Family.MU14:
                return "a", n, -X(n)
            return None

        order = list(range(1, n - 2)) + [n, n - 2, n - 1] if fil else list(range(1, n + 1))
        for d in order:
            if d <= top and d > m:
                extend_table(d)
            target = designate(d)
            if target is None:
                continue
            kind, k, coef = target
            corr = (Y(d) - evaluate(d)) / coef
            if kind == "a":
                a[k] += corr
                if d <= top and k == d - m + 1:
                    c[m][d - m] += lead * corr
            elif kind == "b_nm1":
                b_nm1 += corr
            else:
                b_n += corr

        extra = {}
        if fil:
            extra["b_nm1"] = b_nm1
        if tag is Family.MU11:
            extra["b_n"] = b_n
        if tag is Family.MU12:
            extra["sqrt_a1"] = s
        try:
            params = AutoParams(family, tuple(a[1:]), **extra)
        except ValueError as exc:
            raise WitnessError(f"recovered parameters are invalid: {exc}") from exc
        witness = build_automorphism(params)
        image = mat_vec(witness, xs)
        if exact:
            diffs = [magnitude(image[i] - y[i]) for i in range(n)]
        else:
            diffs = [abs(to_complex(image[i]) - to_complex(y[i])) for i in range(n)]
        # residual in tolerance units: |difference| / max(1, |Phi(x)|) per coordinate
        scaled = [diffs[i] / max(1.0, magnitude(y[i])) for i in range(n)]
        if exact and not rounded:
            bad = [i + 1 for i in range(n) if image[i] != y[i]]
        else:
            bad = [i + 1 for i in range(n) if scaled[i] > tol]
        residual = max(scaled)
        return params, witness, residual, rounded, bad

    # a coarse rounding of an irrational root usually suffices; refine on failure
    for bound in ROOT_BOUNDS:
        result = attempt(bound)
        if result is None:
            continue
        params, witness, residual, rounded, bad = result
        if not bad or not rounded:
            break
    if bad:
        raise WitnessError(
            f"no witness reproduces Phi(x) in row {bad[0]}",
            row=bad[0], residual=residual, x=[fmt(t) for t in xs],
        )
    if verify:
        v = is_automorphism(family_algebra(family), witness, tol)
        if not v:
            raise WitnessError(f"witness is not an automorphism: {v.reason}", **v.detail)
    mode = "exact" if exact and not rounded else "approx"
    return WitnessReport(tuple(xs), m, params, residual, mode)


# ---------------------------------------------------------------------------
# sampled local check


def random_vector(rng: random.Random, n: int, branch: int, zero_rate: float = 0.3) -> tuple:
    """Exact vector whose first nonzero coordinate is ``branch`` (1-based)."""
    x = [Q(0)] * n
    x[branch - 1] = small_rational(rng, nonzero=True)
    for i in range(branch, n):
        x[i] = small_rational(rng, zero_rate=zero_rate)
    return tuple(x)


def sample_vectors(n: int, samples: int, seed: int = 0) -> list[tuple]:
    """``samples`` seeded vectors cycling through branches ``1..n``."""
    if samples < n:
        raise ValueError(f"need at least n={n} samples to cover every branch")
    rng = random.Random(f"x:{n}:{seed}")
    return [random_vector(rng, n, t % n + 1) for t in range(samples)]


def is_local_automorphism(
    family,
    m: Matrix,
    samples: int = 200,
    seed: int = 0,
    shape: str = "derived",
    tol: float = TOL,
) -> Verdict:
    """Shape check, then a verified witness for each sampled ``x``."""
    family = as_family(family, None if isinstance(family, AlgebraFamily) else m.n)
    v = matches_local_shape(family, m, shape, tol)
    if not v:
        return Verdict.fail(v.reason, shape="fail", shape_variant=shape, **{
            k: val for k, val in v.detail.items() if k != "shape"
        }, witnesses=[], failures=[])
    witnesses, failures = [], []
    for x in sample_vectors(family.n, samples, seed):
        try:
            witnesses.append(solve_witness(family, m, x, shape=None, tol=tol))
        except WitnessError as exc:
            failures.append({"x": [fmt(t) for t in x], "reason": exc.reason})
    detail = dict(shape="pass", shape_variant=shape, witnesses=witnesses, failures=failures)
    if failures:
        return Verdict.fail(f"{len(failures)} of {samples} points have no witness", **detail)
    return Verdict.ok(**detail)


# ---------------------------------------------------------------------------
# counterexamples and the shape comparison


def counterexample(family, n: int | None = None) -> Matrix:
    """A local automorphism that is not an automorphism.

    Identity with ``(2, 2) = 2`` for mu0 and mu11, with ``(n-1, n-1) = 2`` for
    mu12 and mu13 (a changed ``(2, 2)`` clashes with ``(n, n)`` there), and
    identity plus ``E(3, 2)`` for mu14 (its diagonal is pinned to 1).
    """
    family = as_family(family, n)
    tag, n = family.tag, family.n
    m = Matrix.identity(n)
    if tag in (Family.MU0, Family.MU11):
        return m.with_entry(1, 1, Q(2))
    if tag in (Family.MU12, Family.MU13):
        return m.with_entry(n - 2, n - 2, Q(2))
    return m.with_entry(2, 1, Q(1))


def branch_check(family: AlgebraFamily, m: Matrix, per_branch: int, seed: int):
    """First failing ``(x, reason)`` over ``per_branch`` vectors per branch, else ``None``."""
    n = family.n
    for x in sample_vectors(n, per_branch * n, seed):
        try:
            solve_witness(family, m, x, shape=None)
        except WitnessError as exc:
            return x, exc.reason
    return None


def shape_discrepancy_report(family, n: int | None = None, count: int = 50, seed: int = 0,
                             per_branch: int = 4) -> dict:
    """Compare both shape variants against the witness verifier.

    ``count`` matrices are drawn from each variant's generator.  For every
    matrix the verifier decides locality on sampled points; a variant is
    certified when its shape verdict agrees with the verifier on every matrix.
    Every disagreement is listed.
    """
    family = as_family(family, n)
    rows = []
    for source in SHAPES:
        for k in range(count):
            m = random_local_matrix(family, seed=seed * 1_000 + k, variant=source)
            hit = branch_check(family, m, per_branch, seed + k)
            entry = {
                "source": source,
                "index": k,
                "witnesses": "pass" if hit is None else "fail",
                "shape": {v: bool(matches_local_shape(family, m, v)) for v in SHAPES},
            }
            if hit is not None:
                entry["failing_x"] = [fmt(t) for t in hit[0]]
                entry["reason"] = hit[1]
            rows.append(entry)
    variants = {}
    for v in SHAPES:
        wrong = [
            {"source": r["source"], "index": r["index"],
             "shape_says": "pass" if r["shape"][v] else "fail", "witnesses": r["witnesses"],
             **({"failing_x": r["failing_x"], "reason": r["reason"]} if "reason" in r else {})}
            for r in rows
            if r["shape"][v] != (r["witnesses"] == "pass")
        ]
        from_own = [r for r in rows if r["source"] == v]
        variants[v] = {
            "matrices": len(from_own),
            "certified_matrices": sum(r["witnesses"] == "pass" for r in from_own),
            "disagreements": wrong,
            "certified": not wrong,
        }
    certified = [v for v in SHAPES if variants[v]["certified"]]
    return {
        "family": family.tag.value,
        "n": family.n,
        "matrices_per_variant": count,
        "variants": variants,
        "certified_shapes": certified,
        "verdict": "pass" if certified else "fail",
    }
