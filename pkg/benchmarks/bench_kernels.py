"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Each kernel is run on identical inputs by both backends; the table lists
the best wall time of each, the speedup and the largest absolute
difference between the two outputs.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from huapickrell.kernels import compiled_kernels, python_kernels


def _cases():
    rng = np.random.default_rng(20241016)
    x = np.linspace(-40.0, 40.0, 2001)
    b = rng.standard_normal(60)
    c = rng.random(60) + 0.5
    xs = np.linspace(1e-3, 60.0, 2000)
    n_steps, N = 200_000, 5
    props = np.tan(np.pi * (rng.random(n_steps) - 0.5))
    logu = np.log1p(-rng.random(n_steps))
    x0 = np.linspace(-1.0, 1.0, N)

    def pj(mod):
        return mod.pj_recurrence(x, b, c, 60, 3)

    def bessel(mod):
        return mod.bessel_ladder_array(-1.5, 4, xs)

    def mh(mod):
        xc = x0.copy()
        out = np.empty((n_steps // N, N))
        mod.mh_run(xc, 3.0 + N, 0.0, 1.0, props, logu, 0, N, out, 0, 0.0)
        return out

    return [("pj_recurrence (2001 pts, degree 60, 3 derivs)", pj),
            ("bessel_ladder_array (2000 pts, 4 orders)", bessel),
            (f"mh_run ({n_steps} steps, N={N})", mh)]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if compiled_kernels is None:
        raise SystemExit("compiled kernels are not built; run `pip install -e .` first")
    print(f"{'kernel':50s} {'python s':>10s} {'cython s':>10s} {'speedup':>8s} {'max diff':>10s}")
    for name, fn in _cases():
        tp = min(timeit.repeat(lambda: fn(python_kernels), number=1, repeat=args.repeat))
        tc = min(timeit.repeat(lambda: fn(compiled_kernels), number=1, repeat=args.repeat))
        diff = float(np.max(np.abs(fn(python_kernels) - fn(compiled_kernels))))
        print(f"{name:50s} {tp:10.4f} {tc:10.4f} {tp / tc:8.1f} {diff:10.2e}")


if __name__ == "__main__":
    main()
