#!/usr/bin/env python3
"""Benchmark the compiled simulation kernels against the numpy fallback.

Times the replicate kernel (uniforms -> patient times -> d-th order
statistic) and the flat sampler on a few problem sizes, checks both
backends agree, and prints a table with the speedup.

Run: python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from durasim import EnrollmentBeta, ExponentialModel, SubgroupArm, WeibullModel
from durasim import kernels


def trial_tables():
    uniform = EnrollmentBeta(period_a=14.0, beta=1.0)
    skewed = EnrollmentBeta(period_a=36.0, beta=0.45)
    arms = (
        SubgroupArm(0.275, uniform, ExponentialModel(0.0693)),
        SubgroupArm(0.225, uniform, ExponentialModel(0.0347), ExponentialModel(0.01)),
        SubgroupArm(0.275, skewed, WeibullModel(1.6, 12.0)),
        SubgroupArm(0.225, skewed, WeibullModel(0.9, 18.0), ExponentialModel(0.02)),
    )
    return kernels.arm_tables(arms)


def best_of(fn, repeats=5):
    timings = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        timings.append(time.perf_counter() - start)
    return min(timings)


def main():
    names = kernels.available_backends()
    backends = {name: kernels.load_backend(name) for name in names}
    print(f"backends: {', '.join(names)} (active: {kernels.BACKEND})")
    if len(backends) < 2:
        print("only one backend available; timing it alone")

    tables = trial_tables()
    rng = np.random.default_rng(12345)

    print("\nreplicate kernel: (reps, n) uniforms -> d-th event time per replicate")
    header = f"{'reps':>8} {'n':>6} {'d':>5}" + "".join(f" {name:>12}" for name in names)
    if len(names) == 2:
        header += f" {'speedup':>9}"
    print(header)
    for reps, n in ((2_000, 140), (10_000, 140), (2_000, 1_000), (500, 5_000)):
        d = int(0.6 * n)
        u = rng.random((reps, n, 4))
        results = {}
        timings = {}
        for name, backend in backends.items():
            backend.dth_event_times(u[:50], *tables, d)  # warm up
            timings[name] = best_of(lambda b=backend: results.__setitem__(
                name, b.dth_event_times(u, *tables, d)))
        row = f"{reps:>8} {n:>6} {d:>5}"
        for name in names:
            row += f" {1e3 * timings[name]:>9.1f} ms"
        if len(names) == 2:
            base, other = names[0], names[1]
            row += f" {timings[other] / timings[base]:>8.2f}x"
            a, b = results[base], results[other]
            finite = np.isfinite(a)
            assert np.array_equal(finite, np.isfinite(b))
            assert np.allclose(a[finite], b[finite], rtol=1e-12, atol=0.0)
        print(row)

    print("\nflat sampler: m uniform rows -> m event times")
    for m in (200_000, 2_000_000):
        u = rng.random((m, 4))
        row = f"{'m=' + str(m):>20}"
        for name, backend in backends.items():
            backend.mixture_draws(u[:1000], *tables)
            timing = best_of(lambda b=backend: b.mixture_draws(u, *tables))
            row += f" {name} {1e3 * timing:>8.1f} ms"
        print(row)

    if len(names) == 2:
        print("\nagreement checked on every replicate-kernel case (rtol 1e-12).")


if __name__ == "__main__":
    main()
