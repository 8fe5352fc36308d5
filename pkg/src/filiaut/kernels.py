"""Kernel selection: compiled ``_kernels`` when importable, else pure Python.

Set ``FILIAUT_PURE_PYTHON=1`` to force the fallback.  Compiled kernels work in
64-bit integers.  When exact values overflow, the multiplicativity check is
rerun modulo enough 31-bit primes to certify the integer result, and other
kernels fall back to Python integers.
"""

import os

import gmpy2

from . import _kernels_py

try:
    if os.environ.get("FILIAUT_PURE_PYTHON"):
        raise ImportError("pure Python kernels requested")
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

BACKEND = "cython" if _compiled is not None else "python"

_impl = _compiled if _compiled is not None else _kernels_py


def _primes(count: int) -> tuple[int, ...]:
    out, p = [], 1 << 30
    while len(out) < count:
        p = int(gmpy2.next_prime(p))
        out.append(p)
    return tuple(out)


PRIMES = _primes(256)


def hom_first_failure(n, entries, pair_ptr, pair_data, mat, d):
    """First pair ``p*n + q`` where ``N/d`` is not multiplicative, else -1 (exact)."""
    if _compiled is not None:
        try:
            return _compiled.hom_first_failure(n, entries, pair_ptr, pair_data, mat, d)
        except OverflowError:
            pass
    return _hom_modular(n, entries, pair_ptr, pair_data, mat, d)


def _hom_modular(n, entries, pair_ptr, pair_data, mat, d):
    big_m = max((abs(v) for v in mat), default=0)
    big_c = max((abs(entries[4 * e + 3]) for e in range(len(entries) // 4)), default=0)
    # |lhs_k - rhs_k| <= bound for every pair and coordinate
    bound = (len(entries) // 4) * big_m * big_m * big_c + n * abs(d) * big_c * big_m
    covered, count = 1, 0
    while covered <= 2 * bound and count < len(PRIMES):
        covered *= PRIMES[count]
        count += 1
    if covered > 2 * bound:
        hit = _impl.hom_certify_mod(n, entries, pair_ptr, pair_data, mat, d, PRIMES[:count])
        if hit < 0:
            return -1
    # a genuine failure (or too few primes); the exact scan names the first failing pair
    return _kernels_py.hom_first_failure(n, entries, pair_ptr, pair_data, mat, d)


def det_nonzero_mod(n, mat, tries: int = 2):
    """``True`` if the integer determinant is certainly nonzero, ``None`` if undecided."""
    for p in PRIMES[:tries]:
        if _impl.det_mod(n, mat, p) != 0:
            return True
    return None


def int_powers(coeffs, n):
    if _compiled is not None:
        try:
            return _compiled.int_powers(coeffs, n)
        except OverflowError:
            pass
    return _kernels_py.int_powers(coeffs, n)
