"""Pure-Python versions of the integer kernels (reference and fallback)."""


def hom_first_failure(n, entries, pair_ptr, pair_data, mat, d):
    """First basis pair ``(p, q)`` violating multiplicativity, as ``p*n + q``; -1 if none.

    ``mat`` is an integer matrix ``N`` (row-major, flat) with ``phi = N / d``;
    ``entries`` is a flat list ``i, j, k, c, ...`` of integer structure
    constants; the products of the pair ``(p, q)`` are
    ``pair_data[2*t], pair_data[2*t+1]`` for ``t`` in
    ``range(pair_ptr[p*n+q], pair_ptr[p*n+q+1])`` as ``(r, c)``.
    Both sides are compared after multiplying through by ``d**2``.
    """
    m = len(entries) // 4
    for p in range(n):
        for q in range(n):
            lhs = [0] * n
            for e in range(m):
                i, j, k, c = entries[4 * e : 4 * e + 4]
                x = mat[i * n + p]
                if x:
                    y = mat[j * n + q]
                    if y:
                        lhs[k] += x * y * c
            rhs = [0] * n
            for t in range(pair_ptr[p * n + q], pair_ptr[p * n + q + 1]):
                r, c = pair_data[2 * t], pair_data[2 * t + 1]
                for k in range(n):
                    v = mat[k * n + r]
                    if v:
                        rhs[k] += d * c * v
            if lhs != rhs:
                return p * n + q
    return -1


def int_powers(coeffs, n):
    """Truncated powers of ``P(t) = sum coeffs[d] t**d``.

    Returns a flat list ``pw`` with ``pw[j*(n+1) + d] = [t**d] P**j`` for
    ``0 <= j, d <= n``.
    """
    w = n + 1
    pw = [0] * (w * w)
    pw[0] = 1
    for j in range(1, w):
        base = (j - 1) * w
        out = j * w
        for d in range(j, w):
            acc = 0
            for k in range(1, d - j + 2):
                c = coeffs[k]
                if c:
                    prev = pw[base + d - k]
                    if prev:
                        acc += c * prev
            pw[out + d] = acc
    return pw


def hom_first_failure_mod(n, entries, pair_ptr, pair_data, mat, d, p):
    """:func:`hom_first_failure` with every quantity reduced modulo the prime ``p``."""
    m = len(entries) // 4
    for a in range(n):
        for b in range(n):
            lhs = [0] * n
            for e in range(m):
                i, j, k, c = entries[4 * e : 4 * e + 4]
                x = mat[i * n + a]
                if x:
                    y = mat[j * n + b]
                    if y:
                        lhs[k] = (lhs[k] + x * y % p * c) % p
            rhs = [0] * n
            for t in range(pair_ptr[a * n + b], pair_ptr[a * n + b + 1]):
                r, c = pair_data[2 * t], pair_data[2 * t + 1]
                dc = d * c % p
                for k in range(n):
                    v = mat[k * n + r]
                    if v:
                        rhs[k] = (rhs[k] + dc * v) % p
            if lhs != rhs:
                return a * n + b
    return -1


def det_mod(n, mat, p):
    """Determinant of the flat ``n x n`` matrix ``mat`` modulo the prime ``p``."""
    a = [[mat[i * n + j] % p for j in range(n)] for i in range(n)]
    det = 1
    for k in range(n):
        piv = next((r for r in range(k, n) if a[r][k]), None)
        if piv is None:
            return 0
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            det = -det
        det = det * a[k][k] % p
        inv = pow(a[k][k], p - 2, p)
        for r in range(k + 1, n):
            f = a[r][k] * inv % p
            if f:
                row_r, row_k = a[r], a[k]
                for j in range(k, n):
                    row_r[j] = (row_r[j] - f * row_k[j]) % p
    return det % p


def hom_certify_mod(n, entries, pair_ptr, pair_data, mat, d, primes):
    """:func:`hom_first_failure_mod` for each prime in turn; first failing pair or -1."""
    for p in primes:
        ent = [v % p if t % 4 == 3 else v for t, v in enumerate(entries)]
        data = [v % p if t % 2 == 1 else v for t, v in enumerate(pair_data)]
        hit = hom_first_failure_mod(n, ent, pair_ptr, data, [v % p for v in mat], d % p, p)
        if hit >= 0:
            return hit
    return -1
