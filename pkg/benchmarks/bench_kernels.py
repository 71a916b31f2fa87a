"""Compare the numba and NumPy kernels on the same inputs.

    python benchmarks/bench_kernels.py [--points 2000] [--t-max 200] [--repeat 5]

Prints the best-of-N time per kernel and backend, the speed-up and the
largest disagreement between the two backends.  ``--end-to-end`` also times
a batch of full evaluations in two subprocesses, one with
LERCHZ_DISABLE_NUMBA=1.
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from lerchz import _kernels_numba as nb
from lerchz import _kernels_numpy as npk
from lerchz.evaluate import _choose_terms
from lerchz.special import binomial_table, em_coefficients, laguerre_rule
from lerchz.types import DEFAULT_POLICY


def best_of(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def max_rel(a, b):
    a = np.asarray(a[0] if isinstance(a, tuple) else a)
    b = np.asarray(b[0] if isinstance(b, tuple) else b)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(a), 1e-300)))


END_TO_END = """
import time, numpy as np
from lerchz.evaluate import _route_batch
from lerchz.types import DEFAULT_POLICY
s = np.linspace(-1.5, 1.4, {n}) + 1j * np.linspace(10, {t}, {n})
_route_batch(0.85, 0.85, s[:4], DEFAULT_POLICY)
t0 = time.perf_counter()
_route_batch(0.85, 0.85, s, DEFAULT_POLICY)
print(time.perf_counter() - t0)
"""


def end_to_end(n, t_max):
    times = {}
    for label, flag in (("numba", "0"), ("numpy", "1")):
        env = dict(os.environ, LERCHZ_DISABLE_NUMBA=flag)
        res = subprocess.run([sys.executable, "-c", END_TO_END.format(n=n, t=t_max)],
                             env=env, capture_output=True, text=True, check=True)
        times[label] = float(res.stdout.strip().splitlines()[-1])
    return times


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=2000)
    ap.add_argument("--t-max", type=float, default=200.0)
    ap.add_argument("--mu", type=float, default=-0.15)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--end-to-end", action="store_true")
    args = ap.parse_args(argv)

    rng = np.random.default_rng(1)
    s = rng.uniform(-1.5, 1.5, args.points) + 1j * rng.uniform(10, args.t_max, args.points)
    alpha = 0.85
    n, _ = _choose_terms(s, args.mu, alpha, DEFAULT_POLICY)
    coef, binom = em_coefficients(), binomial_table()
    nodes, weights = laguerre_rule(DEFAULT_POLICY.laguerre_nodes)

    cases = {
        "head_sums": lambda k: k.head_sums(s, args.mu, alpha, n),
        "em_corrections": lambda k: k.em_corrections(s, args.mu, alpha, n, coef, binom,
                                                     DEFAULT_POLICY.em_order, 1e-17),
        "laguerre_tail": lambda k: k.laguerre_tail(s, args.mu, alpha, n, nodes, weights),
    }
    print(f"{args.points} points, t in [10, {args.t_max:g}], mu={args.mu}, "
          f"mean head length {n.mean():.0f}")
    print(f"{'kernel':<16}{'numba [s]':>12}{'numpy [s]':>12}{'speed-up':>10}{'max rel diff':>14}")
    for name, fn in cases.items():
        fn(nb)  # compile outside the timing
        t_nb, out_nb = best_of(lambda: fn(nb), args.repeat)
        t_np, out_np = best_of(lambda: fn(npk), args.repeat)
        print(f"{name:<16}{t_nb:>12.4f}{t_np:>12.4f}{t_np / t_nb:>10.1f}"
              f"{max_rel(out_nb, out_np):>14.2e}")
    if args.end_to_end:
        times = end_to_end(min(args.points, 500), args.t_max)
        print(f"end-to-end evaluation: numba {times['numba']:.3f}s  numpy {times['numpy']:.3f}s")


if __name__ == "__main__":
    main()
