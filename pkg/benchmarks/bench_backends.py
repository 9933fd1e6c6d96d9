#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Times the two Monte Carlo hot paths (slot-level frame sampling and
trajectory stepping) on both backends and prints a comparison table.

    python benchmarks/bench_backends.py [--n-trials N] [--n-molecules N]
"""

import argparse
import time

from molekom import (
    ChannelParams,
    McConfig,
    NoiseParams,
    TxSchedule,
    arrival_prob_table,
    numba_available,
    simulate_slot_level,
    simulate_trajectory,
)

CHANNEL = ChannelParams(d=1e-6, D_p=5e-10, D_tx=1e-9, D_rx=1e-9, tau=0.01)


def time_call(fn, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_slot_level(backend, n_trials):
    qtab = arrival_prob_table(20, CHANNEL)
    sched = TxSchedule.uniform(30, 20, 0.5)
    noise = NoiseParams(mu_o=0.0, sigma2_o=10.0)
    cfg = McConfig(n_trials=n_trials, seed=1, backend=backend)
    simulate_slot_level(sched, noise, qtab, McConfig(n_trials=1000, seed=1, backend=backend))  # warmup/JIT
    return time_call(lambda: simulate_slot_level(sched, noise, qtab, cfg))


def bench_trajectory(backend, n_molecules):
    cfg = McConfig(n_trials=1, seed=1, fidelity="trajectory", max_offset=3, backend=backend)
    warm = McConfig(n_trials=1, seed=1, fidelity="trajectory", max_offset=3, backend=backend)
    simulate_trajectory(CHANNEL, 1, 1000, warm)
    return time_call(lambda: simulate_trajectory(CHANNEL, 1, n_molecules, cfg))


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n-trials", type=int, default=200_000,
                        help="slot-level frames per timing run (default 200000)")
    parser.add_argument("--n-molecules", type=int, default=50_000,
                        help="trajectory molecules per timing run (default 50000)")
    args = parser.parse_args()

    backends = ["numpy"]
    if numba_available():
        backends.insert(0, "numba")
    else:
        print("numba not importable; timing the numpy fallback only")

    rows = []
    for backend in backends:
        t_slot = bench_slot_level(backend, args.n_trials)
        t_traj = bench_trajectory(backend, args.n_molecules)
        rows.append((backend, t_slot, args.n_trials / t_slot, t_traj, args.n_molecules / t_traj))

    print(f"\nslot-level: k=20, Q=30/slot, {args.n_trials} frames; "
          f"trajectory: release slot 1, horizon 4 slots, dt=tau/1000, {args.n_molecules} molecules")
    print(f"{'backend':<8} {'slot-level s':>13} {'frames/s':>12} {'trajectory s':>13} {'molecules/s':>12}")
    for name, ts, fps, tt, mps in rows:
        print(f"{name:<8} {ts:>13.3f} {fps:>12.0f} {tt:>13.3f} {mps:>12.0f}")
    if len(rows) == 2:
        print(f"\nspeedup (numba/numpy): slot-level {rows[1][1] / rows[0][1]:.1f}x, "
              f"trajectory {rows[1][3] / rows[0][3]:.1f}x")


if __name__ == "__main__":
    main()
