"""Compiled vs numpy kernels on the two hot loops.

    python benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import time

import numpy as np

from csit_dof import kernels
from csit_dof.bounds import FEAS_TOL, TIE_TOL, VERTEX_COND_MAX, build_polytope
from csit_dof.channel import SINGULAR_COND, RngStream, sample_channels
from csit_dof.schedule import cyclic_window
from csit_dof.simulator import plan_schedule


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = sorted(kernels.BACKENDS)
    print(f"active backend: {kernels.BACKEND}; available: {', '.join(backends)}")

    cases = []
    for M, K in [(3, 6), (4, 7), (5, 8)]:
        poly = build_polytope(M, K, 0.5)
        w = np.ones(K)
        cases.append((f"vertex_max   M={M} K={K} ({len(poly.b)} constraints)",
                      lambda b, p=poly, w=w: kernels.vertex_max(
                          p.A, p.b, w, VERTEX_COND_MAX, FEAS_TOL, TIE_TOL, backend=b)))
    for M, K, n in [(2, 3, 30_000), (4, 8, 30_000)]:
        plan = plan_schedule(cyclic_window(M, K, n - n % K), M)
        H = sample_channels(RngStream(1), K, M, 0, len(plan.n_served))
        snr = 10.0 ** (np.array([30.0, 40.0, 50.0, 60.0]) / 10)
        cases.append((f"slot_rates   M={M} K={K} slots={len(plan.n_served)}",
                      lambda b, H=H, plan=plan, snr=snr: kernels.slot_rate_sums(
                          H, plan.served, plan.n_served, plan.precoded, snr, SINGULAR_COND,
                          backend=b)))

    header = f"{'case':52s}" + "".join(f"{b:>12s}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10s}"
    print(header)
    for name, fn in cases:
        t = {b: best_of(lambda: fn(b), args.repeat) for b in backends}
        line = f"{name:52s}" + "".join(f"{t[b]:11.4f}s" for b in backends)
        if len(backends) == 2:
            line += f"{t['python'] / t['compiled']:9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
