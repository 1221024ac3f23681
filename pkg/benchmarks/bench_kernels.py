"""Time the compiled kernels against the pure-Python fallback.

Usage: python benchmarks/bench_kernels.py [--K 200] [--n 64] [--q 4] [--repeat 3]
"""
import argparse
import time

import numpy as np

from adpaad import _kernels_py
from adpaad.timeseries import plan_subsections

try:
    from adpaad import _ckernels
except ImportError:
    _ckernels = None


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--K", type=int, default=200)
    ap.add_argument("--n", type=int, default=64)
    ap.add_argument("--q", type=int, default=4)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    series = np.cumsum(rng.normal(size=args.K + args.n - 1))
    windows = np.lib.stride_tricks.sliding_window_view(series, args.n).copy()
    bounds = plan_subsections(windows, args.q).bounds

    impls = [("python", _kernels_py)]
    if _ckernels is not None:
        impls.append(("cython", _ckernels))
    else:
        print("compiled extension not built; timing the fallback only")

    results = {}
    print(f"K={args.K} n={args.n} q={args.q} (best of {args.repeat})")
    print(f"{'kernel':<12}" + "".join(f"{name:>12}" for name, _ in impls) + f"{'speedup':>10}")
    for kernel in ("paad", "similarity", "scores"):
        times = []
        for name, impl in impls:
            if kernel == "paad":
                t, out = best_of(lambda: impl.paad_kernel(windows, bounds), args.repeat)
                out = out[0]
            elif kernel == "similarity":
                mu = _kernels_py.paad_kernel(windows, bounds)[0]
                t, out = best_of(lambda: impl.similarity_kernel(mu), args.repeat)
            else:
                S = _kernels_py.similarity_kernel(_kernels_py.paad_kernel(windows, bounds)[0])
                t, out = best_of(lambda: impl.scores_kernel(S), args.repeat)
            times.append(t)
            results.setdefault(kernel, []).append(out)
        if len(results[kernel]) == 2:
            assert results[kernel][0].tobytes() == results[kernel][1].tobytes(), kernel
        speed = f"{times[0] / times[1]:>9.1f}x" if len(times) == 2 else ""
        print(f"{kernel:<12}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times) + speed)


if __name__ == "__main__":
    main()
