"""Compare the compiled kernels with their pure-Python fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
from __future__ import annotations

import argparse
import statistics
import time

import numpy as np

from maxcut_sdp import _fallback

try:
    from maxcut_sdp import _kernels
except ImportError:
    _kernels = None


def _time(fn, repeat):
    runs = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        runs.append(time.perf_counter() - t0)
    return statistics.median(runs)


def _sym(n, seed):
    a = np.random.default_rng(seed).standard_normal((n, n))
    return (a + a.T) / 2


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if _kernels is None:
        print("compiled extension not built; nothing to compare")
        return 1

    print(f"{'kernel':<26}{'python':>12}{'compiled':>12}{'speedup':>10}")
    for n in (6, 12, 24):
        A = _sym(n, n)
        tp = _time(lambda: _fallback.jacobi_eigh(A), args.repeat)
        tc = _time(lambda: _kernels.jacobi_eigh(A), args.repeat)
        assert np.allclose(np.sort(_fallback.jacobi_eigh(A)[0]), np.sort(_kernels.jacobi_eigh(A)[0]))
        print(f"{'jacobi_eigh n=' + str(n):<26}{tp * 1e3:>10.3f}ms{tc * 1e3:>10.3f}ms{tp / tc:>9.1f}x")
    for n in (10, 16, 20):
        W = _sym(n, 100 + n)
        np.fill_diagonal(W, 0.0)
        tp = _time(lambda: _fallback.brute_force_cut(W, 1e-10), args.repeat)
        tc = _time(lambda: _kernels.brute_force_cut(W, 1e-10), args.repeat)
        assert _fallback.brute_force_cut(W, 1e-10)[0] == _kernels.brute_force_cut(W, 1e-10)[0]
        print(f"{'brute_force_cut n=' + str(n):<26}{tp * 1e3:>10.3f}ms{tc * 1e3:>10.3f}ms{tp / tc:>9.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
