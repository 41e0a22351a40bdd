"""Compare the compiled frame kernel with the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--n 20000] [--repeat 5]

Prints best-of-``repeat`` wall time per backend and the max difference
between their outputs.
"""

import argparse
import time

import numpy as np

from ruledform import _kernels_py, kernels
from ruledform.verify import default_families, sample_points


def inputs(family, n, seed):
    th, s, w = sample_points(family, n, seed)
    d, ds, dss = family.evaluate_many(s)
    cfg = family.cfg
    return d, ds, dss, th, w, cfg.epsilon, cfg.epsilon_tilde, cfg.r


def best_of(fn, args, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=20000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    print(f"compiled backend available: {kernels.BACKEND == 'cython'}")
    print(f"{'family':22s} {'python ms':>10s} {'compiled ms':>12s} {'speedup':>8s} {'max diff':>9s}")
    for fam in default_families():
        data = inputs(fam, args.n, 0)
        t_py, out_py = best_of(_kernels_py.frame_batch, data, args.repeat)
        if kernels.BACKEND != "cython":
            print(f"{fam.kind.value:22s} {1e3 * t_py:10.2f} {'-':>12s}")
            continue
        t_c, out_c = best_of(kernels.frame_batch, data, args.repeat)
        diff = max(float(np.nanmax(np.abs(a - b))) for a, b in zip(out_c, out_py))
        print(f"{fam.kind.value:22s} {1e3 * t_py:10.2f} {1e3 * t_c:12.2f} "
              f"{t_py / t_c:8.1f} {diff:9.1e}")


if __name__ == "__main__":
    main()
