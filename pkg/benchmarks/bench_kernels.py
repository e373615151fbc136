"""Compare the compiled and pure-Python special-function kernels.

    python3 benchmarks/bench_kernels.py [--repeat N]

Each workload is timed on both backends (best of N) and the results are
checked to agree before the speedup is reported.
"""
import argparse
import math
import timeit

import numpy as np

from robustdoe import _kernels_py

try:
    from robustdoe import _kernels
except ImportError:
    _kernels = None

F_VALUES = np.logspace(-2, 3, 25)
DFS = (1, 2, 5, 10, 24, 50)


def betainc_grid(mod):
    out = []
    for f in F_VALUES:
        for d1 in DFS:
            for d2 in DFS:
                denom = d2 + d1 * f
                out.append(mod.betainc(0.5 * d2, 0.5 * d1, d2 / denom, d1 * f / denom))
    return out


def ptukey_sweep(mod):
    return [mod.ptukey(q, k, df) for q in (1.0, 2.5, 4.0) for k in (2, 3, 5, 10)
            for df in (5.0, 24.0, math.inf)]


def qtukey_point(mod):
    return [mod.qtukey(0.95, 3, 24.0)]


WORKLOADS = [
    ("betainc, F-tail grid (%d calls)" % (len(F_VALUES) * len(DFS) ** 2), betainc_grid),
    ("ptukey sweep (36 calls)", ptukey_sweep),
    ("qtukey(0.95, 3, 24)", qtukey_point),
]


def best_time(fn, mod, repeat):
    return min(timeit.repeat(lambda: fn(mod), number=1, repeat=repeat))


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3, help="timing repeats (best of)")
    args = parser.parse_args(argv)
    if _kernels is None:
        parser.exit(1, "compiled extension robustdoe._kernels is not built; "
                       "run `pip install -e . --no-build-isolation` first\n")

    print(f"{'workload':<36} {'python (s)':>11} {'compiled (s)':>13} {'speedup':>8}")
    for name, fn in WORKLOADS:
        ref = np.array(fn(_kernels_py))
        got = np.array(fn(_kernels))
        if not np.allclose(got, ref, rtol=1e-12, atol=1e-14):
            raise SystemExit(f"{name}: backends disagree (max diff {np.max(np.abs(got - ref)):.3g})")
        t_py = best_time(fn, _kernels_py, args.repeat)
        t_c = best_time(fn, _kernels, args.repeat)
        print(f"{name:<36} {t_py:>11.4f} {t_c:>13.4f} {t_py / t_c:>7.1f}x")


if __name__ == "__main__":
    main()
