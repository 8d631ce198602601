"""Compare the compiled and pure-Python kernels.

    python3 benchmarks/bench_kernels.py --sizes 20 50 100 --repeat 3
"""

import argparse
import timeit

import numpy as np

from optomo import _pykernels
from optomo.linalg import MODULUS

try:
    from optomo import _kernels
except ImportError:
    _kernels = None


def random_graph(rng, n, p):
    a = np.triu((rng.random((n, n)) < p).astype(np.int64), 1)
    a = a + a.T
    # a path keeps the graph connected
    idx = np.arange(n - 1)
    a[idx, idx + 1] = a[idx + 1, idx] = 1
    return a


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[20, 50, 100, 200])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if _kernels is None:
        print("compiled extension not built; only the fallback can run")
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<16}{'n':>6}{'python [s]':>14}{'cython [s]':>14}{'speedup':>10}")
    for n in args.sizes:
        adj = random_graph(rng, n, 3.0 / n)
        mat = rng.integers(0, 3, size=(n, n))
        for name, py, cy in (
            ("floyd_warshall", lambda: _pykernels.floyd_warshall(adj),
             _kernels and (lambda: _kernels.floyd_warshall(adj))),
            ("rank_mod_p", lambda: _pykernels.rank_mod_p(mat, MODULUS),
             _kernels and (lambda: _kernels.rank_mod_p(mat, MODULUS))),
        ):
            t_py = best(py, args.repeat)
            if cy:
                t_cy = best(cy, args.repeat)
                print(f"{name:<16}{n:>6}{t_py:>14.5f}{t_cy:>14.6f}{t_py / t_cy:>10.1f}")
            else:
                print(f"{name:<16}{n:>6}{t_py:>14.5f}{'-':>14}{'-':>10}")


if __name__ == "__main__":
    main()
