# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled integer kernels.

Same contracts as ``_kernels_py``; arithmetic runs on 64-bit integers with
overflow detection.  On overflow ``OverflowError`` is raised and the caller
retries with the arbitrary-precision Python version.
"""

from libc.stdlib cimport malloc, free

cdef extern from *:
    bint mul_ovf "__builtin_mul_overflow"(long long a, long long b, long long *res) nogil
    bint add_ovf "__builtin_add_overflow"(long long a, long long b, long long *res) nogil
    ctypedef unsigned long long u128 "unsigned __int128"


cdef long long* _as_array(object values, Py_ssize_t size) except NULL:
    cdef long long* out = <long long*> malloc((size if size > 0 else 1) * sizeof(long long))
    cdef Py_ssize_t i
    if out == NULL:
        raise MemoryError()
    try:
        for i in range(size):
            out[i] = values[i]
    except OverflowError:
        free(out)
        raise
    return out


cdef int _hom_scan(int n, long long* ent, int m, long long* ptr, long long* data,
                   long long* mat, long long d, long long* lhs, long long* rhs) nogil:
    # returns first failing pair, -1 if none, -2 on overflow
    cdef int p, q, e, k, t, i, j
    cdef long long x, y, c, v, prod
    for p in range(n):
        for q in range(n):
            for k in range(n):
                lhs[k] = 0
                rhs[k] = 0
            for e in range(m):
                i = <int> ent[4 * e]
                x = mat[i * n + p]
                if x == 0:
                    continue
                j = <int> ent[4 * e + 1]
                y = mat[j * n + q]
                if y == 0:
                    continue
                k = <int> ent[4 * e + 2]
                c = ent[4 * e + 3]
                if mul_ovf(x, y, &prod) or mul_ovf(prod, c, &prod):
                    return -2
                if add_ovf(lhs[k], prod, &lhs[k]):
                    return -2
            for t in range(<int> ptr[p * n + q], <int> ptr[p * n + q + 1]):
                j = <int> data[2 * t]
                c = data[2 * t + 1]
                if mul_ovf(d, c, &x):
                    return -2
                for k in range(n):
                    v = mat[k * n + j]
                    if v == 0:
                        continue
                    if mul_ovf(x, v, &prod) or add_ovf(rhs[k], prod, &rhs[k]):
                        return -2
            for k in range(n):
                if lhs[k] != rhs[k]:
                    return p * n + q
    return -1


def hom_first_failure(int n, entries, pair_ptr, pair_data, mat, d):
    cdef Py_ssize_t ne = len(entries), np_ = len(pair_ptr), nd = len(pair_data)
    cdef long long* ent = NULL
    cdef long long* ptr = NULL
    cdef long long* data = NULL
    cdef long long* cmat = NULL
    cdef long long* lhs = NULL
    cdef long long* rhs = NULL
    cdef long long cd = d
    cdef int result
    try:
        ent = _as_array(entries, ne)
        ptr = _as_array(pair_ptr, np_)
        data = _as_array(pair_data, nd)
        cmat = _as_array(mat, n * n)
        lhs = <long long*> malloc(n * sizeof(long long))
        rhs = <long long*> malloc(n * sizeof(long long))
        if lhs == NULL or rhs == NULL:
            raise MemoryError()
        with nogil:
            result = _hom_scan(n, ent, <int> (ne // 4), ptr, data, cmat, cd, lhs, rhs)
    finally:
        free(ent)
        free(ptr)
        free(data)
        free(cmat)
        free(lhs)
        free(rhs)
    if result == -2:
        raise OverflowError("64-bit overflow in hom_first_failure")
    return result


def int_powers(coeffs, int n):
    cdef int w = n + 1
    cdef long long* c = NULL
    cdef long long* pw = NULL
    cdef int j, d, k
    cdef long long acc, prod
    cdef bint overflow = False
    try:
        c = _as_array(coeffs, w)
        pw = <long long*> malloc(w * w * sizeof(long long))
        if pw == NULL:
            raise MemoryError()
        with nogil:
            for j in range(w * w):
                pw[j] = 0
            pw[0] = 1
            for j in range(1, w):
                if overflow:
                    break
                for d in range(j, w):
                    acc = 0
                    for k in range(1, d - j + 2):
                        if c[k] == 0 or pw[(j - 1) * w + d - k] == 0:
                            continue
                        if mul_ovf(c[k], pw[(j - 1) * w + d - k], &prod) or add_ovf(acc, prod, &acc):
                            overflow = True
                            break
                    if overflow:
                        break
                    pw[j * w + d] = acc
        if overflow:
            raise OverflowError("64-bit overflow in int_powers")
        return [pw[j] for j in range(w * w)]
    finally:
        free(c)
        free(pw)


cdef int _hom_scan_mod(int n, long long* ent, int m, long long* ptr, long long* data,
                       long long* mat, long long d, long long p,
                       long long* lhs, long long* rhs) nogil:
    # inputs reduced into [0, p) with p < 2**31, so each product fits in 62 bits
    # and up to 2**64 of them can be summed in a 128-bit accumulator
    cdef int a, b, e, k, t, i, j
    cdef long long x, y, c, v
    cdef u128* acc_l = <u128*> lhs
    cdef u128* acc_r = <u128*> rhs
    for a in range(n):
        for b in range(n):
            for k in range(n):
                acc_l[k] = 0
                acc_r[k] = 0
            for e in range(m):
                i = <int> ent[4 * e]
                x = mat[i * n + a]
                if x == 0:
                    continue
                j = <int> ent[4 * e + 1]
                y = mat[j * n + b]
                if y == 0:
                    continue
                k = <int> ent[4 * e + 2]
                acc_l[k] += <u128> (x * y % p) * <u128> ent[4 * e + 3]
            for t in range(<int> ptr[a * n + b], <int> ptr[a * n + b + 1]):
                j = <int> data[2 * t]
                c = data[2 * t + 1] * d % p
                for k in range(n):
                    v = mat[k * n + j]
                    if v != 0:
                        acc_r[k] += <u128> (c * v)
            for k in range(n):
                if acc_l[k] % <u128> p != acc_r[k] % <u128> p:
                    return a * n + b
    return -1


def hom_first_failure_mod(int n, entries, pair_ptr, pair_data, mat, d, long long p):
    cdef Py_ssize_t ne = len(entries), np_ = len(pair_ptr), nd = len(pair_data)
    cdef long long* ent = NULL
    cdef long long* ptr = NULL
    cdef long long* data = NULL
    cdef long long* cmat = NULL
    cdef long long* lhs = NULL
    cdef long long* rhs = NULL
    cdef long long cd = d
    cdef int result
    try:
        ent = _as_array(entries, ne)
        ptr = _as_array(pair_ptr, np_)
        data = _as_array(pair_data, nd)
        cmat = _as_array(mat, n * n)
        lhs = <long long*> malloc(2 * n * sizeof(long long))
        rhs = <long long*> malloc(2 * n * sizeof(long long))
        if lhs == NULL or rhs == NULL:
            raise MemoryError()
        with nogil:
            result = _hom_scan_mod(n, ent, <int> (ne // 4), ptr, data, cmat, cd, p, lhs, rhs)
    finally:
        free(ent)
        free(ptr)
        free(data)
        free(cmat)
        free(lhs)
        free(rhs)
    return result


cdef long long _pow_mod(long long b, long long e, long long p) nogil:
    cdef long long r = 1
    b %= p
    while e > 0:
        if e & 1:
            r = r * b % p
        b = b * b % p
        e >>= 1
    return r


def det_mod(int n, mat, long long p):
    cdef long long* a = NULL
    cdef long long det = 1, inv, f, tmp
    cdef int i, j, k, r, piv
    try:
        a = _as_array([v % p for v in mat], n * n)
        with nogil:
            for k in range(n):
                piv = -1
                for r in range(k, n):
                    if a[r * n + k] != 0:
                        piv = r
                        break
                if piv < 0:
                    det = 0
                    break
                if piv != k:
                    for j in range(n):
                        tmp = a[k * n + j]
                        a[k * n + j] = a[piv * n + j]
                        a[piv * n + j] = tmp
                    det = p - det
                det = det * a[k * n + k] % p
                inv = _pow_mod(a[k * n + k], p - 2, p)
                for r in range(k + 1, n):
                    f = a[r * n + k] * inv % p
                    if f == 0:
                        continue
                    for j in range(k, n):
                        a[r * n + j] = (a[r * n + j] - f * a[k * n + j] % p + p) % p
        return det % p
    finally:
        free(a)


def hom_certify_mod(int n, entries, pair_ptr, pair_data, mat, d, primes):
    """Run the modular scan for each prime in turn; first failing pair or -1."""
    cdef Py_ssize_t ne = len(entries), np_ = len(pair_ptr), nd = len(pair_data)
    cdef Py_ssize_t i, size = n * n, m = ne // 4
    cdef long long* ent = NULL
    cdef long long* ent_p = NULL
    cdef long long* ptr = NULL
    cdef long long* data = NULL
    cdef long long* data_p = NULL
    cdef long long* cmat = NULL
    cdef long long* lhs = NULL
    cdef long long* rhs = NULL
    cdef long long p, cd
    cdef int result = -1
    try:
        ent = _as_array(entries, ne)
        ent_p = _as_array(entries, ne)
        ptr = _as_array(pair_ptr, np_)
        data = _as_array(pair_data, nd)
        data_p = _as_array(pair_data, nd)
        cmat = <long long*> malloc((size if size > 0 else 1) * sizeof(long long))
        lhs = <long long*> malloc(2 * n * sizeof(long long))
        rhs = <long long*> malloc(2 * n * sizeof(long long))
        if cmat == NULL or lhs == NULL or rhs == NULL:
            raise MemoryError()
        for prime in primes:
            p = prime
            for i in range(size):
                cmat[i] = mat[i] % prime
            cd = d % prime
            with nogil:
                for i in range(m):
                    ent_p[4 * i + 3] = ent[4 * i + 3] % p
                    if ent_p[4 * i + 3] < 0:
                        ent_p[4 * i + 3] += p
                for i in range(nd // 2):
                    data_p[2 * i + 1] = data[2 * i + 1] % p
                    if data_p[2 * i + 1] < 0:
                        data_p[2 * i + 1] += p
                result = _hom_scan_mod(n, ent_p, <int> m, ptr, data_p, cmat, cd, p, lhs, rhs)
            if result >= 0:
                break
    finally:
        free(ent)
        free(ent_p)
        free(ptr)
        free(data)
        free(data_p)
        free(cmat)
        free(lhs)
        free(rhs)
    return result
