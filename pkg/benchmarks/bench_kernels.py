"""Timing comparison of the two sequence enumeration kernels.

Runs the compiled extension and the NumPy fallback on the same
workloads, checks that they agree, and prints a small table with the
best-of-N wall times and the speedup. Workloads stay under the default
sequence cap so the script runs in seconds.

Usage: python3 benchmarks/bench_kernels.py [--repeats 5]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from eprsim import kernels
from eprsim.spin import singlet_joint_probability

# (label, category probabilities, sequence length)
WORKLOADS = [
    ("biased coin, n=20", np.array([0.3, 0.7]), 20),
    ("biased coin, n=23", np.array([0.3, 0.7]), 23),
    ("singlet 60 deg, n=10", singlet_joint_probability(60.0).matrix.reshape(-1), 10),
    ("singlet 60 deg, n=11", singlet_joint_probability(60.0).matrix.reshape(-1), 11),
    ("six categories, n=8", np.full(6, 1.0 / 6.0), 8),
]


def best_time(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5, help="timing repeats per case")
    args = parser.parse_args()

    if not kernels.HAVE_COMPILED:
        print("compiled kernel not built; timing the python fallback only")

    header = f"{'workload':<24} {'sequences':>12} {'python':>10}"
    if kernels.HAVE_COMPILED:
        header += f" {'compiled':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))

    for label, p, n in WORKLOADS:
        keys_py, w_py = kernels.sequence_count_weights(p, n, implementation="python")
        t_py = best_time(
            lambda: kernels.sequence_count_weights(p, n, implementation="python"),
            args.repeats,
        )
        row = f"{label:<24} {p.size**n:>12} {t_py:>9.4f}s"
        if kernels.HAVE_COMPILED:
            keys_c, w_c = kernels.sequence_count_weights(p, n, implementation="compiled")
            np.testing.assert_array_equal(keys_py, keys_c)
            # summation order differs between backends, hence the slack
            np.testing.assert_allclose(w_py, w_c, rtol=1e-9, atol=0.0)
            t_c = best_time(
                lambda: kernels.sequence_count_weights(p, n, implementation="compiled"),
                args.repeats,
            )
            row += f" {t_c:>9.4f}s {t_py / t_c:>7.1f}x"
        print(row)

    return 0


if __name__ == "__main__":
    raise SystemExit(main())
