"""Time the compiled kernels against the pure Python fallback.

Imports both backend modules directly, so it ignores MPISAC_KERNELS and
always measures the two implementations side by side. Each workload is
checked for bit-identical agreement before it is timed; a speedup table
goes to stdout.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import sys
import timeit

import numpy as np

from mpisac.kernels import _reference

try:
    from mpisac.kernels import _native
except ImportError:
    print("compiled kernels are not built; install with\n"
          "  pip install -e . --no-build-isolation\n"
          "and rerun", file=sys.stderr)
    sys.exit(1)


def best_usecs(fn, repeat):
    number, _ = timeit.Timer(fn).autorange()
    runs = timeit.repeat(fn, number=number, repeat=repeat)
    return min(runs) / number * 1e6


def _run_waterfill(m, a):
    out = np.empty(len(a))
    lam = m.waterfill(a, 0.4 * len(a), 0.9, out)
    return lam, out


def workloads():
    rng = np.random.default_rng(0)
    for n in (8, 32, 128, 512):
        probs = rng.uniform(0.01, 0.99, n)
        yield (f"pb_tail_le      N={n:<4}",
               lambda m, p=probs, k=n // 2: m.pb_tail_le(p, k))
    for n in (16, 128, 1024):
        p = float(rng.uniform(0.1, 0.9))
        yield (f"binom_tail_le   n={n:<4}",
               lambda m, n=n, p=p, k=n // 2: m.binom_tail_le(n, p, k))
    for n in (4, 16, 64, 256):
        a = rng.uniform(0.5, 2.0, n)
        yield (f"waterfill       n={n:<4}",
               lambda m, a=a: _run_waterfill(m, a))


def _equal(x, y):
    if isinstance(x, tuple):
        return len(x) == len(y) and all(_equal(a, b) for a, b in zip(x, y))
    return np.array_equal(x, y)


def check_parity(label, fn):
    out_ref = fn(_reference)
    out_nat = fn(_native)
    if not _equal(out_ref, out_nat):
        print(f"parity failure in {label}: {out_ref!r} != {out_nat!r}",
              file=sys.stderr)
        sys.exit(1)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5,
                    help="timing repetitions per workload (default 5)")
    args = ap.parse_args(argv)

    print(f"{'kernel':<22}{'reference':>12}{'native':>12}{'speedup':>10}")
    for label, fn in workloads():
        check_parity(label, fn)
        t_ref = best_usecs(lambda: fn(_reference), args.repeat)
        t_nat = best_usecs(lambda: fn(_native), args.repeat)
        print(f"{label:<22}{t_ref:>10.2f}us{t_nat:>10.2f}us"
              f"{t_ref / t_nat:>9.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
