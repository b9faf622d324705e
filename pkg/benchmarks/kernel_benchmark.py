#!/usr/bin/env python3
"""Compare the compiled scoring kernel against the pure-Python fallback.

Times the batch trust evaluation and the streaming step fold on synthetic
observation histories of increasing size and prints the speedup.

    python benchmarks/kernel_benchmark.py [--repeats 5]
"""

from __future__ import annotations

import argparse
import random
import time

import numpy as np

from chaintrust._kernels import get_backend

CASES = [
    # (epochs, sensors)
    (50, 7),
    (200, 10),
    (500, 20),
]

ARGS = (0.85, 1.0, 0.0, 2.0, 8.0, 1.0, False)  # decay, caps, band, tolerance, clamp


def synth(rng: random.Random, epochs: int, sensors: int):
    values = [[rng.uniform(0.0, 12.0) for _ in range(sensors)] for _ in range(epochs)]
    confs = [[rng.random() for _ in range(sensors)] for _ in range(epochs)]
    return values, confs


def time_batch(backend, values, confs, repeats: int) -> float:
    if backend.BACKEND == "cython":
        values = np.array(values, dtype=np.float64)
        confs = np.array(confs, dtype=np.float64)
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        backend.trust_batch_raw(values, confs, *ARGS)
        best = min(best, time.perf_counter() - start)
    return best


def time_step_fold(backend, values, confs, repeats: int) -> float:
    if backend.BACKEND == "cython":
        rows = [
            (np.array(v, dtype=np.float64), np.array(c, dtype=np.float64))
            for v, c in zip(values, confs)
        ]
    else:
        rows = list(zip(values, confs))
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        trust = 0.0
        for row_v, row_c in rows:
            trust = backend.trust_step_raw(trust, row_v, row_c, *ARGS)
        best = min(best, time.perf_counter() - start)
    return best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    py = get_backend("py")
    try:
        cy = get_backend("cy")
    except ImportError:
        cy = None
        print("compiled kernel not built; timing the pure backend only\n")

    rng = random.Random(1)
    header = f"{'case':>18} {'kernel':>20} {'python':>12} {'compiled':>12} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for epochs, sensors in CASES:
        values, confs = synth(rng, epochs, sensors)
        label = f"{epochs}x{sensors}"
        for kernel_name, timer in (("batch", time_batch), ("step fold", time_step_fold)):
            t_py = timer(py, values, confs, args.repeats)
            if cy is not None:
                t_cy = timer(cy, values, confs, args.repeats)
                print(
                    f"{label:>18} {kernel_name:>20} {t_py * 1e3:>10.3f}ms "
                    f"{t_cy * 1e3:>10.3f}ms {t_py / t_cy:>8.1f}x"
                )
                got_py = py.trust_batch_raw(values, confs, *ARGS)
                got_cy = cy.trust_batch_raw(
                    np.array(values, dtype=np.float64),
                    np.array(confs, dtype=np.float64),
                    *ARGS,
                )
                assert abs(got_py - got_cy) < 1e-12, "backends disagree"
            else:
                print(f"{label:>18} {kernel_name:>20} {t_py * 1e3:>10.3f}ms {'-':>12} {'-':>9}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
