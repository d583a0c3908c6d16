"""Compare the compiled kernels against the numpy fallback.

Run with ``python benchmarks/bench_kernels.py``.  Each case is timed on both
backends and the results are checked for agreement.
"""

from __future__ import annotations

import argparse
import math
import time

import numpy as np

from liebraid import _fallback
from liebraid.kzflow import kz_monodromy, pure_braid_loop, random_configs
from liebraid.represent import build_casimir_rep

try:
    from liebraid import _kernels
except ImportError:  # extension not built
    _kernels = None


def best_of(fn, repeat: int) -> tuple[float, object]:
    best, out = math.inf, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def kz_case(impl, rep, loop):
    import liebraid.kernels as k

    saved = k.kz_segment
    k.kz_segment = impl.kz_segment
    try:
        return kz_monodromy(loop, rep, 0.1, 1e-10)
    finally:
        k.kz_segment = saved


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--configs", type=int, default=100)
    ap.add_argument("--steps", type=int, default=1000)
    args = ap.parse_args(argv)
    if _kernels is None:
        raise SystemExit("compiled extension not available; build with pip install -e .")

    C = np.zeros((4, 4))
    C[0, 1] = C[1, 0] = 1.0
    C[0, 2] = C[2, 0] = 0.5
    configs = np.ascontiguousarray(random_configs(4, args.configs, seed=1))
    rep = build_casimir_rep("sl2", ["1/2"] * 4)
    loop = pure_braid_loop(4, 1, 4)

    cases = [
        (
            f"sphere_rk4 ({args.configs} configs x {args.steps} steps, n=4)",
            lambda impl: impl.sphere_rk4(C, configs, 1e-3, args.steps),
        ),
        (
            f"sphere_rk4_trajectory ({args.steps} steps, n=4)",
            lambda impl: impl.sphere_rk4_trajectory(C, configs[0], 1e-3, args.steps, 10)[1],
        ),
        ("kz_monodromy (A_14, spin-1/2 x4, tol 1e-10)", lambda impl: kz_case(impl, rep, loop)),
    ]
    print(f"{'case':58s} {'cython [s]':>11s} {'python [s]':>11s} {'speedup':>8s} {'max diff':>10s}")
    for name, fn in cases:
        tc, rc = best_of(lambda: fn(_kernels), args.repeat)
        tp, rp = best_of(lambda: fn(_fallback), args.repeat)
        diff = float(np.abs(np.asarray(rc) - np.asarray(rp)).max())
        print(f"{name:58s} {tc:11.4f} {tp:11.4f} {tp / tc:8.1f} {diff:10.2e}")


if __name__ == "__main__":
    main()
