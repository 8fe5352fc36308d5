"""Compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each kernel is timed on the same inputs through both backends; the results
are checked for equality before timing.
"""

from __future__ import annotations

import argparse
import random
import sys
import timeit

from filiaut import _kernels_py, kernels
from filiaut.algebra import FAMILIES, make_algebra
from filiaut.automorphisms import build_automorphism, random_automorphism
from filiaut.linalg import scale_to_integers


def hom_cases(count: int, seed: int = 0):
    rng = random.Random(seed)
    out = []
    for k in range(count):
        tag = FAMILIES[k % len(FAMILIES)]
        n = rng.randint(4, 8)
        alg = make_algebra(tag, n)
        m = build_automorphism(random_automorphism(alg.family, seed=k))
        ints, d = scale_to_integers(m)
        entries, ptr, data = alg.kernel_table
        out.append((n, entries, ptr, data, [v for row in ints for v in row], d))
    return out


def power_cases(count: int, seed: int = 1):
    rng = random.Random(seed)
    return [([0] + [rng.randint(-9, 9) for _ in range(n)], n) for n in
            (rng.randint(4, 10) for _ in range(count))]


def det_cases(count: int, seed: int = 2):
    rng = random.Random(seed)
    return [(n, [rng.randint(-99, 99) for _ in range(n * n)]) for n in
            (rng.randint(4, 10) for _ in range(count))]


def bench(label, fn_fast, fn_slow, cases, repeat):
    for c in cases:
        assert fn_fast(*c) == fn_slow(*c), f"{label}: backends disagree on {c!r}"
    fast = min(timeit.repeat(lambda: [fn_fast(*c) for c in cases], number=1, repeat=repeat))
    slow = min(timeit.repeat(lambda: [fn_slow(*c) for c in cases], number=1, repeat=repeat))
    per = 1e6 / len(cases)
    print(f"{label:<22} {fast * per:>10.2f} us {slow * per:>10.2f} us {slow / fast:>8.1f}x")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--cases", type=int, default=500)
    args = ap.parse_args(argv)
    compiled = kernels._compiled
    if compiled is None:
        print("compiled kernels are not built; nothing to compare", file=sys.stderr)
        return 1
    print(f"{'kernel':<22} {'cython':>13} {'python':>13} {'speedup':>9}")
    homs = hom_cases(args.cases)
    bench("hom_first_failure", compiled.hom_first_failure, _kernels_py.hom_first_failure, homs,
          args.repeat)
    primes = kernels.PRIMES[:4]
    bench("hom_certify_mod", lambda *c: compiled.hom_certify_mod(*c, primes),
          lambda *c: _kernels_py.hom_certify_mod(*c, primes), homs, args.repeat)
    bench("int_powers", compiled.int_powers, _kernels_py.int_powers, power_cases(args.cases),
          args.repeat)
    p = kernels.PRIMES[0]
    bench("det_mod", lambda n, m: compiled.det_mod(n, m, p), lambda n, m: _kernels_py.det_mod(n, m, p),
          det_cases(args.cases), args.repeat)
    return 0


if __name__ == "__main__":
    sys.exit(main())
