"""Compare the compiled and numpy stretch kernels on a few graph shapes.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Prints the best wall time per (n, p, variant) and the speed-up.  Both kernels
must agree on the maximising pair; the script exits non-zero otherwise.
"""

import argparse
import sys
import time

from stretchlab import _kernels_py
from stretchlab.geom import pairwise_euclid
from stretchlab.model import ModelParams, generate
from stretchlab.stretch import _adj_u8, _csr, use_dense

try:
    from stretchlab import _kernels as compiled
except ImportError:
    compiled = None

CASES = [(200, 0.5), (400, 0.9), (400, 0.05), (800, "1-2/n"), (500, 0.5)]


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if compiled is None:
        print("compiled kernels not built; nothing to compare", file=sys.stderr)
        return 1
    print(f"{'n':>5} {'p':>8} {'kernel':>6} {'python s':>10} {'cython s':>10} {'speed-up':>9}")
    for n, p in CASES:
        p = 1 - 2 / n if p == "1-2/n" else p
        g = generate(ModelParams(n, p, 1))
        dmat, adj = pairwise_euclid(g.points), _adj_u8(g)
        indptr, indices = _csr(g)
        dense = use_dense(g)
        run = lambda k: k.max_stretch(dmat, adj, indptr, indices, dense=dense)  # noqa: E731
        tp, a = best_of(lambda: run(_kernels_py), args.repeat)
        tc, b = best_of(lambda: run(compiled), args.repeat)
        if tuple(a[1:3]) != tuple(b[1:3]):
            print(f"pair mismatch at n={n} p={p}: {a} vs {b}", file=sys.stderr)
            return 2
        kind = "dense" if dense else "heap"
        print(f"{n:>5} {p:>8.4f} {kind:>6} {tp:>10.4f} {tc:>10.4f} {tp / tc:>8.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
