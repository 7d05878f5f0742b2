"""Time the compiled slot kernel against the pure-Python one.

    python benchmarks/bench_kernel.py [--horizon N] [--repeat R]

Both backends consume identical random draws, so the script also checks
that they produce identical statistics.
"""

from __future__ import annotations

import argparse
import time

from holblock import IntersectionSpec
from holblock.sim import SimConfig, available_backends, simulate

CASES = {
    "model I,  p_t=0.5": IntersectionSpec.build("I", (0.1, 0.1, 0.1), (1 / 3, 1 / 3, 1 / 3), 0.5),
    "model I,  p_t=0  ": IntersectionSpec.build("I", (0.1, 0.1, 0.1), (1 / 3, 1 / 3, 1 / 3), 0.0),
    "model II, p_t=0  ": IntersectionSpec.build("II", (0.15, 0.15), (0.5, 0.5), 0.0),
}


def best_of(spec, horizon, backend, repeat):
    best, stats = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        stats = simulate(SimConfig(spec, horizon=horizon, seed=1), backend)
        best = min(best, time.perf_counter() - t0)
    return best, stats


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--horizon", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    backends = available_backends()
    print(f"horizon {args.horizon} slots, best of {args.repeat}; backends: {', '.join(backends)}")
    print(f"{'case':<20}" + "".join(f"{b:>14}" for b in backends) + ("     speedup" if len(backends) > 1 else ""))
    for name, spec in CASES.items():
        times, results = [], []
        for b in backends:
            t, s = best_of(spec, args.horizon, b, args.repeat)
            times.append(t)
            results.append(s)
        row = f"{name:<20}" + "".join(f"{t * 1e3:>11.1f} ms" for t in times)
        if len(backends) > 1:
            same = results[0].mean_wait == results[1].mean_wait and \
                results[0].service_time_histogram == results[1].service_time_histogram
            row += f"{times[1] / times[0]:>11.1f}x" + ("" if same else "  (MISMATCH)")
        print(row)


if __name__ == "__main__":
    main()
