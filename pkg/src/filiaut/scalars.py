"""Exact rational and approximate complex scalars.

Exact values are ``gmpy2.mpq`` (always in lowest terms, positive
denominator).  Approximate values are plain Python ``complex``.  The two are
never mixed inside one computation: callers switch a whole computation to
approximate mode with :func:`to_complex`.

:class:`GaussQ` (a rational plus a rational multiple of ``i``) lets the
witness solver stay exact when it needs a non-real root.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from typing import NamedTuple, Union

import gmpy2
from gmpy2 import mpq

Exact = type(mpq(0))
Scalar = Union["mpq", complex]

#: absolute tolerance, scaled by ``max(1, |expected|)``
TOL = 1e-9

_EXACT_TYPES = (int, Fraction, Exact)
_ZERO = mpq(0)


class NonFiniteError(ArithmeticError):
    pass


def Q(value) -> mpq:
    """Coerce ``int``, ``Fraction``, ``mpq`` or a ``"p/q"`` string to ``mpq``."""
    if type(value) is Exact or isinstance(value, Exact):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(value, int):
        return mpq(value)
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, str):
        text = value.strip()
        if not text:
            raise ValueError("empty rational literal")
        try:
            return mpq(text)
        except ValueError as exc:
            raise ValueError(f"not a rational literal: {value!r}") from exc
    raise TypeError(f"cannot make an exact scalar from {type(value).__name__}")


class GaussQ:
    """Exact ``re + im*i`` with rational parts and ``im != 0``.

    Build values with :func:`gauss`, which returns a plain ``mpq`` when the
    imaginary part vanishes, so real results stay on the rational fast path.
    """

    __slots__ = ("re", "im")

    def __init__(self, re: mpq, im: mpq):
        self.re = re
        self.im = im

    @staticmethod
    def _parts(other):
        t = type(other)
        if t is GaussQ:
            return other.re, other.im
        if t is Exact:
            return other, _ZERO
        if isinstance(other, GaussQ):
            return other.re, other.im
        if isinstance(other, _EXACT_TYPES) and not isinstance(other, bool):
            return Q(other), mpq(0)
        return None

    def __add__(self, other):
        p = self._parts(other)
        return NotImplemented if p is None else gauss(self.re + p[0], self.im + p[1])

    __radd__ = __add__

    def __sub__(self, other):
        p = self._parts(other)
        return NotImplemented if p is None else gauss(self.re - p[0], self.im - p[1])

    def __rsub__(self, other):
        p = self._parts(other)
        return NotImplemented if p is None else gauss(p[0] - self.re, p[1] - self.im)

    def __neg__(self):
        return GaussQ(-self.re, -self.im)

    def __mul__(self, other):
        t = type(other)
        if t is Exact or t is int:
            return gauss(self.re * other, self.im * other)
        if t is GaussQ:
            a, b, c, d = self.re, self.im, other.re, other.im
            return gauss(a * c - b * d, a * d + b * c)
        p = self._parts(other)
        if p is None:
            return NotImplemented
        c, d = p
        return gauss(self.re * c - self.im * d, self.re * d + self.im * c)

    __rmul__ = __mul__

    def _inverse(self):
        norm = self.re * self.re + self.im * self.im
        return GaussQ(self.re / norm, -self.im / norm)

    def __truediv__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        return self * (gauss(*p) ** -1)

    def __rtruediv__(self, other):
        p = self._parts(other)
        return NotImplemented if p is None else gauss(*p) * self._inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        base = self
        if k < 0:
            base, k = self._inverse(), -k
        out = mpq(1)
        while k:
            if k & 1:
                out = base * out
            k >>= 1
            if k:
                base = base * base
        return out

    def __eq__(self, other):
        if isinstance(other, GaussQ):
            return self.re == other.re and self.im == other.im
        return False

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return True

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussQ({self.re}, {self.im})"


def gauss(re, im=0):
    """``re + im*i`` as ``mpq`` when real, else :class:`GaussQ`."""
    re, im = Q(re), Q(im)
    return re if im == 0 else GaussQ(re, im)


def is_exact(value) -> bool:
    """Rational (``int``, ``Fraction`` or ``mpq``)."""
    t = type(value)
    if t is Exact or t is int:
        return True
    if t is complex or t is float or t is GaussQ:
        return False
    return isinstance(value, _EXACT_TYPES)


def is_exact_like(value) -> bool:
    """Rational or Gaussian rational."""
    t = type(value)
    if t is Exact or t is GaussQ or t is int:
        return True
    if t is complex or t is float:
        return False
    return isinstance(value, _EXACT_TYPES) or isinstance(value, GaussQ)


def exact_of_float(z: complex):
    """The binary value of a double (or complex double) as an exact scalar."""
    z = complex(z)
    return gauss(Fraction(z.real), Fraction(z.imag))


def to_complex(value) -> complex:
    if isinstance(value, complex):
        z = value
    elif isinstance(value, _EXACT_TYPES):
        z = complex(float(value))
    elif isinstance(value, GaussQ):
        z = complex(value)
    else:
        z = complex(value)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise NonFiniteError(f"non-finite value {z!r}")
    return z


def scalar(value, exact: bool = True):
    """Coerce ``value`` into the requested mode."""
    return Q(value) if exact else to_complex(value)


def is_zero(value, tol: float = TOL) -> bool:
    if isinstance(value, _EXACT_TYPES):
        return value == 0
    if isinstance(value, GaussQ):
        return False
    return abs(value) <= tol


def close(value, expected, tol: float = TOL) -> bool:
    """Exact equality for two exact values, scaled tolerance otherwise."""
    if is_exact_like(value) and is_exact_like(expected):
        return value == expected
    e = to_complex(expected)
    return abs(to_complex(value) - e) <= tol * max(1.0, abs(e))


def magnitude(value) -> float:
    return abs(to_complex(value))


def check_finite(value):
    if isinstance(value, complex) and not (
        math.isfinite(value.real) and math.isfinite(value.imag)
    ):
        raise NonFiniteError(f"non-finite value {value!r}")
    return value


class RootSet(NamedTuple):
    """Roots of ``z**k == s``.

    ``exact`` is the principal rational root (positive for even ``k``) or
    ``None``; ``approx`` holds all ``k`` complex roots, principal first.
    """

    exact: mpq | None
    approx: tuple[complex, ...]

    def rational(self) -> tuple[mpq, ...]:
        """Every rational root (``r`` and ``-r`` for even ``k``)."""
        if self.exact is None:
            return ()
        if self.exact != 0 and len(self.approx) % 2 == 0:
            return (self.exact, -self.exact)
        return (self.exact,)

    def principal(self):
        return self.exact if self.exact is not None else self.approx[0]


def _exact_root(s: mpq, k: int) -> mpq | None:
    if s == 0:
        return mpq(0)
    sign = 1
    if s < 0:
        if k % 2 == 0:
            return None
        sign = -1
    p, p_ok = gmpy2.iroot(abs(s.numerator), k)
    if not p_ok:
        return None
    q, q_ok = gmpy2.iroot(s.denominator, k)
    if not q_ok:
        return None
    return mpq(sign * int(p), int(q))


def nth_roots(s, k: int) -> RootSet:
    """All ``k``-th roots of ``s``; the rational one too when it exists."""
    if k < 1:
        raise ValueError("root order must be positive")
    exact = _exact_root(s, k) if is_exact(s) else None
    if is_exact(s):
        s = Q(s)
    z = to_complex(s)
    if z == 0:
        return RootSet(exact, (0j,) * k)
    r = abs(z) ** (1.0 / k)
    theta = cmath.phase(z) / k
    roots = []
    for j in range(k):
        w = cmath.rect(r, theta + 2 * math.pi * j / k)
        # one Newton step tightens the last few ulps for large k
        w = w - (w**k - z) / (k * w ** (k - 1))
        roots.append(w)
    return RootSet(exact, tuple(roots))


#: denominator bounds tried, coarse first, when rounding an irrational root
ROOT_BOUNDS = (2**16, 2**24, 2**32)
ROOT_DENOMINATOR = ROOT_BOUNDS[-1]


def _round(q: mpq, bound: int) -> mpq:
    return Q(Fraction(int(q.numerator), int(q.denominator)).limit_denominator(bound))


def exact_root(s, k: int, bound: int = ROOT_DENOMINATOR):
    """An exact ``z`` with ``z**k == s``, or a rounded one: returns ``(z, rounded)``.

    Preference order: the rational root; a real root; the principal complex
    root (exact when its double is exact) as a Gaussian rational.  Irrational
    roots are refined well past double precision and then replaced by the
    best rational approximation with denominator at most ``bound`` (per
    part), so ``|z**k - s|`` is about ``k * |s| / bound**2``.
    """
    if k < 1:
        raise ValueError("root order must be positive")
    if is_exact(s):
        s = Q(s)
        exact = _exact_root(s, k)
        if exact is not None:
            return exact, False
        if s > 0 or k % 2 == 1:
            mag = abs(s)
            bits = 2 * bound.bit_length() + 8
            scaled = int(gmpy2.f_div(mag.numerator << (bits * k), mag.denominator))
            r = _round(mpq(int(gmpy2.iroot(scaled, k)[0]), 1 << bits), bound)
            return (r if s > 0 else -r), True
    elif not isinstance(s, GaussQ):
        raise TypeError("exact_root needs an exact scalar")
    z = exact_of_float(nth_roots(to_complex(s), k).approx[0])
    if z**k == s:
        return z, False
    re, im = (s.re, s.im) if isinstance(s, GaussQ) else (s, mpq(0))
    with gmpy2.context(gmpy2.get_context(), precision=4 * bound.bit_length() + 32):
        r = gmpy2.exp(gmpy2.log(gmpy2.mpc(gmpy2.mpfr(re), gmpy2.mpfr(im))) / k)
        re, im = mpq(*r.real.as_integer_ratio()), mpq(*r.imag.as_integer_ratio())
    return gauss(_round(re, bound), _round(im, bound)), True


def fmt(value):
    """Serialize: ``"p/q"`` (``"p"`` when q == 1) or ``{"re", "im"}``.

    Gaussian rationals keep exact ``"p/q"`` strings inside ``{"re", "im"}``.
    """
    if isinstance(value, _EXACT_TYPES):
        return str(Q(value))
    if isinstance(value, GaussQ):
        return {"re": str(value.re), "im": str(value.im)}
    z = to_complex(value)
    return {"re": z.real, "im": z.imag}


def parse(obj):
    """Inverse of :func:`fmt`; bare ints are accepted as exact values."""
    if isinstance(obj, dict):
        if set(obj) != {"re", "im"}:
            raise ValueError(f"complex scalar needs exactly 're' and 'im': {obj!r}")
        re, im = obj["re"], obj["im"]
        if isinstance(re, str) and isinstance(im, str):
            return gauss(Q(re), Q(im))
        if isinstance(re, bool) or isinstance(im, bool):
            raise ValueError(f"not a scalar: {obj!r}")
        try:
            return to_complex(complex(float(re), float(im)))
        except (TypeError, ValueError) as exc:
            raise ValueError(f"not a scalar: {obj!r}") from exc
    if isinstance(obj, (str, int)) and not isinstance(obj, bool):
        return Q(obj)
    raise ValueError(f"not a scalar: {obj!r}")
