"""Timing comparison of the compiled and pure-python kernel backends.

Measures the two hot loops (Howell echelon, cocycle scan) on synthetic
matrices sized like real solver workloads, then times the full second
cohomology of a symmetric group end to end under each backend.
"""

import argparse
import time

import numpy as np

from stackyab import _kernels_py, kernels
from stackyab.groups import from_table, symmetric
from stackyab.cohomology import second_cohomology

try:
    from stackyab import _speedups
except ImportError:
    _speedups = None


def _time(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_echelon(rng, rows, cols, p, k, repeats):
    q = p**k
    mat = rng.integers(0, q, size=(rows, cols), dtype=np.int64)
    out = {}
    for name, impl in (("python", _kernels_py), ("compiled", _speedups)):
        if impl is None:
            continue
        out[name] = _time(
            lambda impl=impl: kernels.canonicalize(*impl.echelon_raw(mat, p, k), p, k),
            repeats,
        )
    return out


def bench_cocycle_scan(rng, n, q, repeats):
    # the zero table on a cyclic group is a valid cocycle: full-table scan
    table = ((np.arange(n)[:, None] + np.arange(n)[None, :]) % n).astype(np.int32)
    vals = np.zeros((n, n), dtype=np.int64)
    out = {}
    for name, impl in (("python", _kernels_py), ("compiled", _speedups)):
        if impl is None:
            continue
        out[name] = _time(lambda impl=impl: impl.cocycle_violation(table, vals, q), repeats)
    return out


def bench_end_to_end(n, modulus, repeats):
    out = {}
    for name, impl in (("python", _kernels_py), ("compiled", _speedups)):
        if impl is None:
            continue
        saved = kernels._impl
        kernels._impl = impl
        try:
            def run():
                g = from_table(symmetric(n).table)  # fresh group, no solver cache
                second_cohomology(g, [modulus])

            out[name] = _time(run, repeats)
        finally:
            kernels._impl = saved
    return out


def report(label, res):
    py = res.get("python")
    cy = res.get("compiled")
    line = f"{label:<34s} python {py:8.3f}s"
    if cy is not None:
        line += f"   compiled {cy:8.3f}s   speedup {py / cy:5.1f}x"
    else:
        line += "   compiled      n/a"
    print(line)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=20260818)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--rows", type=int, default=15000)
    ap.add_argument("--cols", type=int, default=240)
    ap.add_argument("--scan-order", type=int, default=120)
    ap.add_argument("--sym", type=int, default=5, help="symmetric group degree for the end-to-end run")
    ap.add_argument("--modulus", type=int, default=8)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    if _speedups is None:
        print("compiled backend unavailable; timing the fallback only")

    report(
        f"echelon {args.rows}x{args.cols} mod 8",
        bench_echelon(rng, args.rows, args.cols, 2, 3, args.repeats),
    )
    report(
        f"cocycle scan n={args.scan_order}",
        bench_cocycle_scan(rng, args.scan_order, 2, args.repeats),
    )
    report(
        f"H2(S{args.sym}, [{args.modulus}]) end to end",
        bench_end_to_end(args.sym, args.modulus, args.repeats),
    )


if __name__ == "__main__":
    main()
